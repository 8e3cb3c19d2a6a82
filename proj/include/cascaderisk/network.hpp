#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cascaderisk {

using NodeIndex = std::size_t;
using Date = std::chrono::year_month_day;

// One interbank trade as recorded by the market: `lender` lent `amount` to
// `borrower` on `date`.
struct TransactionRecord {
  std::string lender;
  std::string borrower;
  double amount = 0.0;
  Date date{};

  bool operator==(const TransactionRecord&) const = default;
};

struct IngestResult {
  std::vector<TransactionRecord> records;
  std::vector<std::string> warnings;
};

// Reads `lender_id,borrower_id,amount,YYYY-MM-DD` lines. Lines starting with
// '#' are comments; blank lines are skipped with a warning. Any malformed
// line, nonpositive amount or self-loop throws InputError naming the line.
IngestResult ingest_transactions(std::istream& in);
IngestResult ingest_transactions(const std::filesystem::path& path);

Date parse_date(std::string_view text);
std::string format_date(const Date& date);

// Closed calendar interval [first, last].
struct DateWindow {
  Date first;
  Date last;

  bool contains(const Date& d) const { return first <= d && d <= last; }
};

struct Loan {
  NodeIndex lender = 0;
  NodeIndex borrower = 0;
  double amount = 0.0;

  bool operator==(const Loan&) const = default;
};

// Weighted directed graph of interbank loans. Node ids are opaque strings
// mapped to dense indices; loans are kept sorted by (lender, borrower) with
// at most one entry per ordered pair.
//
// Construction does not reject self-loops or nonpositive amounts so that
// validate_network can report them; calibration refuses such networks.
class FinancialNetwork {
 public:
  FinancialNetwork() = default;

  // Duplicate (lender, borrower) entries are summed.
  FinancialNetwork(std::vector<std::string> node_ids, std::vector<Loan> loans);

  std::size_t size() const { return node_ids_.size(); }
  std::size_t edge_count() const { return loans_.size(); }
  bool empty() const { return node_ids_.empty(); }

  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::string& node_id(NodeIndex i) const { return node_ids_.at(i); }
  std::optional<NodeIndex> index_of(std::string_view id) const;

  std::span<const Loan> loans() const { return loans_; }

  // A_ij, or 0 when i has not lent to j.
  double loan(NodeIndex lender, NodeIndex borrower) const;
  double loan(std::string_view lender, std::string_view borrower) const;

  double total_volume() const;

  // Copy with every loan amount multiplied by `factor`.
  FinancialNetwork scaled(double factor) const;

  // Content equality: same node set and same id-keyed loan amounts,
  // independent of index order.
  bool operator==(const FinancialNetwork& other) const;

  // Content equality plus identical node order.
  bool identical_to(const FinancialNetwork& other) const;

 private:
  std::vector<std::string> node_ids_;
  std::vector<Loan> loans_;
  std::unordered_map<std::string, NodeIndex> index_;
};

// Sums all in-window trades per (lender, borrower). Nodes are the endpoints of
// in-window trades in first-appearance order (lender before borrower). The
// per-pair sum is taken over amounts in ascending order so the result does not
// depend on record order. Throws InputError when the window selects nothing.
FinancialNetwork aggregate_window(std::span<const TransactionRecord> records,
                                  const std::optional<DateWindow>& window = std::nullopt);

struct NodeStrengths {
  std::vector<double> out_strength;  // S^L_i, total lent
  std::vector<double> in_strength;   // S^B_i, total borrowed
  std::vector<std::size_t> out_degree;
  std::vector<std::size_t> in_degree;

  double total_lent() const;
  double total_borrowed() const;
};

NodeStrengths node_strengths(const FinancialNetwork& net);

enum class IssueKind { SelfLoop, NonPositiveAmount, IsolatedNode, TooFewNodes };

struct ValidationIssue {
  IssueKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

// Self-loops and nonpositive amounts are errors. Isolated nodes and networks
// with fewer than two nodes are warnings.
ValidationReport validate_network(const FinancialNetwork& net);

// Snapshot format:
//   # nodes=N edges=M
//   # node=<id>            (N lines, in index order)
//   lender_id,borrower_id,amount
// The node lines are optional on read; without them node order is first
// appearance in the loan rows.
void write_snapshot(std::ostream& out, const FinancialNetwork& net);
FinancialNetwork read_snapshot(std::istream& in);
FinancialNetwork read_snapshot(const std::filesystem::path& path);

}  // namespace cascaderisk
