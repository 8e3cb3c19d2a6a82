#include "cascaderisk/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "cascaderisk/error.hpp"
#include "cascaderisk/format.hpp"

namespace cascaderisk {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no); }

double parse_amount(std::string_view text, std::size_t line_no) {
  const double amount = parse_double(std::string(text), where(line_no) + ": amount");
  if (!std::isfinite(amount) || amount <= 0.0) {
    throw InputError(where(line_no) + ": amount must be strictly positive, got '" +
                     std::string(text) + "'");
  }
  return amount;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path.string());
  return in;
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  const auto bad = [&] { return InputError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  const auto parse_part = [&](std::size_t pos, std::size_t len, auto& out) {
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    if (ec != std::errc{} || ptr != first + len) throw bad();
  };
  parse_part(0, 4, y);
  parse_part(5, 2, m);
  parse_part(8, 2, d);
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw bad();
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

IngestResult ingest_transactions(std::istream& in) {
  IngestResult result;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) {
      result.warnings.push_back(where(line_no) + ": blank line skipped");
      continue;
    }
    if (line.front() == '#') continue;

    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw InputError(where(line_no) + ": expected 4 comma-separated fields, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw InputError(where(line_no) + ": empty node id");
    }
    if (fields[0] == fields[1]) {
      throw InputError(where(line_no) + ": self-loop, lender and borrower are both '" +
                       std::string(fields[0]) + "'");
    }
    TransactionRecord rec;
    rec.lender = std::string(fields[0]);
    rec.borrower = std::string(fields[1]);
    rec.amount = parse_amount(fields[2], line_no);
    try {
      rec.date = parse_date(fields[3]);
    } catch (const InputError& e) {
      throw InputError(where(line_no) + ": " + e.what());
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

IngestResult ingest_transactions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return ingest_transactions(in);
}

FinancialNetwork::FinancialNetwork(std::vector<std::string> node_ids, std::vector<Loan> loans)
    : node_ids_(std::move(node_ids)) {
  index_.reserve(node_ids_.size());
  for (NodeIndex i = 0; i < node_ids_.size(); ++i) {
    if (!index_.emplace(node_ids_[i], i).second) {
      throw InputError("duplicate node id '" + node_ids_[i] + "'");
    }
  }
  for (const auto& l : loans) {
    if (l.lender >= node_ids_.size() || l.borrower >= node_ids_.size()) {
      throw InputError("loan references a node index outside the network");
    }
  }
  std::stable_sort(loans.begin(), loans.end(), [](const Loan& a, const Loan& b) {
    return std::pair(a.lender, a.borrower) < std::pair(b.lender, b.borrower);
  });
  for (const auto& l : loans) {
    if (!loans_.empty() && loans_.back().lender == l.lender && loans_.back().borrower == l.borrower) {
      loans_.back().amount += l.amount;
    } else {
      loans_.push_back(l);
    }
  }
}

std::optional<NodeIndex> FinancialNetwork::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double FinancialNetwork::loan(NodeIndex lender, NodeIndex borrower) const {
  const auto it = std::lower_bound(loans_.begin(), loans_.end(), std::pair(lender, borrower),
                                   [](const Loan& l, const std::pair<NodeIndex, NodeIndex>& key) {
                                     return std::pair(l.lender, l.borrower) < key;
                                   });
  if (it == loans_.end() || it->lender != lender || it->borrower != borrower) return 0.0;
  return it->amount;
}

double FinancialNetwork::loan(std::string_view lender, std::string_view borrower) const {
  const auto i = index_of(lender);
  const auto j = index_of(borrower);
  if (!i || !j) return 0.0;
  return loan(*i, *j);
}

double FinancialNetwork::total_volume() const {
  double total = 0.0;
  for (const auto& l : loans_) total += l.amount;
  return total;
}

FinancialNetwork FinancialNetwork::scaled(double factor) const {
  std::vector<Loan> loans(loans_.begin(), loans_.end());
  for (auto& l : loans) l.amount *= factor;
  return {node_ids_, std::move(loans)};
}

bool FinancialNetwork::operator==(const FinancialNetwork& other) const {
  if (size() != other.size() || edge_count() != other.edge_count()) return false;
  for (const auto& id : node_ids_) {
    if (!other.index_of(id)) return false;
  }
  for (const auto& l : loans_) {
    const auto i = other.index_of(node_ids_[l.lender]);
    const auto j = other.index_of(node_ids_[l.borrower]);
    if (other.loan(*i, *j) != l.amount) return false;
  }
  return true;
}

bool FinancialNetwork::identical_to(const FinancialNetwork& other) const {
  return node_ids_ == other.node_ids_ && loans_ == other.loans_;
}

FinancialNetwork aggregate_window(std::span<const TransactionRecord> records,
                                  const std::optional<DateWindow>& window) {
  if (window && window->last < window->first) {
    throw ParameterError("aggregation window ends before it starts");
  }
  std::vector<std::string> ids;
  std::unordered_map<std::string, NodeIndex> index;
  const auto intern = [&](const std::string& id) {
    const auto [it, inserted] = index.emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  };

  std::map<std::pair<NodeIndex, NodeIndex>, std::vector<double>> volumes;
  for (const auto& rec : records) {
    if (window && !window->contains(rec.date)) continue;
    const auto i = intern(rec.lender);
    const auto j = intern(rec.borrower);
    volumes[{i, j}].push_back(rec.amount);
  }
  if (ids.empty()) throw InputError("aggregation window selects no transactions");

  std::vector<Loan> loans;
  loans.reserve(volumes.size());
  for (auto& [key, amounts] : volumes) {
    std::sort(amounts.begin(), amounts.end());
    double sum = 0.0;
    for (const double a : amounts) sum += a;
    loans.push_back({key.first, key.second, sum});
  }
  return {std::move(ids), std::move(loans)};
}

double NodeStrengths::total_lent() const {
  double total = 0.0;
  for (const double s : out_strength) total += s;
  return total;
}

double NodeStrengths::total_borrowed() const {
  double total = 0.0;
  for (const double s : in_strength) total += s;
  return total;
}

NodeStrengths node_strengths(const FinancialNetwork& net) {
  const auto n = net.size();
  NodeStrengths s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                  std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0)};
  for (const auto& l : net.loans()) {
    s.out_strength[l.lender] += l.amount;
    s.in_strength[l.borrower] += l.amount;
    ++s.out_degree[l.lender];
    ++s.in_degree[l.borrower];
  }
  return s;
}

ValidationReport validate_network(const FinancialNetwork& net) {
  ValidationReport report;
  std::vector<bool> touched(net.size(), false);
  for (const auto& l : net.loans()) {
    const auto& a = net.node_id(l.lender);
    const auto& b = net.node_id(l.borrower);
    if (l.lender == l.borrower) {
      report.errors.push_back({IssueKind::SelfLoop, "self-loop on node '" + a + "'"});
    }
    if (!(l.amount > 0.0) || !std::isfinite(l.amount)) {
      report.errors.push_back({IssueKind::NonPositiveAmount,
                               "loan " + a + "->" + b + " has nonpositive amount " + format_double(l.amount)});
    }
    touched[l.lender] = true;
    touched[l.borrower] = true;
  }
  for (NodeIndex i = 0; i < net.size(); ++i) {
    if (!touched[i]) {
      report.warnings.push_back({IssueKind::IsolatedNode, "node '" + net.node_id(i) + "' has no loans"});
    }
  }
  if (net.size() < 2) {
    report.warnings.push_back({IssueKind::TooFewNodes, "network has fewer than two nodes"});
  }
  return report;
}

void write_snapshot(std::ostream& out, const FinancialNetwork& net) {
  out << "# nodes=" << net.size() << " edges=" << net.edge_count() << '\n';
  for (const auto& id : net.node_ids()) out << "# node=" << id << '\n';
  for (const auto& l : net.loans()) {
    out << net.node_id(l.lender) << ',' << net.node_id(l.borrower) << ',' << format_double(l.amount) << '\n';
  }
}

FinancialNetwork read_snapshot(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::pair<std::size_t, std::size_t>> header;
  std::vector<std::string> ids;
  std::unordered_map<std::string, NodeIndex> index;
  bool declared = false;
  std::vector<Loan> loans;

  const auto intern = [&](std::string_view id, bool declaring) -> NodeIndex {
    const auto [it, inserted] = index.emplace(std::string(id), ids.size());
    if (inserted) {
      if (declared && !declaring) {
        throw InputError(where(line_no) + ": node '" + std::string(id) + "' was not declared");
      }
      ids.emplace_back(id);
    } else if (declaring) {
      throw InputError(where(line_no) + ": node '" + std::string(id) + "' declared twice");
    }
    return it->second;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      if (body.starts_with("nodes=")) {
        std::size_t n = 0;
        std::size_t m = 0;
        if (std::sscanf(std::string(body).c_str(), "nodes=%zu edges=%zu", &n, &m) != 2) {
          throw InputError(where(line_no) + ": malformed snapshot header");
        }
        header = {n, m};
      } else if (body.starts_with("node=")) {
        if (!loans.empty()) throw InputError(where(line_no) + ": node declaration after loan rows");
        intern(trim(body.substr(5)), true);
        declared = true;
      }
      continue;
    }
    if (!header) throw InputError(where(line_no) + ": snapshot header '# nodes=N edges=M' missing");
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw InputError(where(line_no) + ": expected 3 comma-separated fields, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw InputError(where(line_no) + ": empty node id");
    if (fields[0] == fields[1]) {
      throw InputError(where(line_no) + ": self-loop on node '" + std::string(fields[0]) + "'");
    }
    const auto i = intern(fields[0], false);
    const auto j = intern(fields[1], false);
    loans.push_back({i, j, parse_amount(fields[2], line_no)});
  }
  if (!header) throw InputError("snapshot header '# nodes=N edges=M' missing");
  FinancialNetwork net(std::move(ids), std::move(loans));
  if (net.size() != header->first || net.edge_count() != header->second) {
    throw InputError("snapshot header says nodes=" + std::to_string(header->first) +
                     " edges=" + std::to_string(header->second) + " but file holds nodes=" +
                     std::to_string(net.size()) + " edges=" + std::to_string(net.edge_count()));
  }
  return net;
}

FinancialNetwork read_snapshot(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_snapshot(in);
}

}  // namespace cascaderisk
