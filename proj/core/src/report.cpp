#include "jasmine/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "text_util.hpp"

namespace jasmine {

using detail::format_number;

std::string learning_curve_header() { return "sim,method,t,labeled,f1\n"; }

std::string learning_curve_row(int sim, const std::string& method, const CurvePoint& point) {
  return std::to_string(sim) + ',' + method + ',' + std::to_string(point.t) + ',' + std::to_string(point.labeled) +
         ',' + format_number(point.metric) + '\n';
}

std::vector<LearningCurve> parse_learning_curves(std::string_view text) {
  std::vector<LearningCurve> curves;
  std::map<std::pair<int, std::string>, std::size_t> where;
  std::size_t line_no = 0;
  for (auto line : detail::split(text, '\n')) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.rfind("sim,", 0) == 0) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 5) throw std::runtime_error("learning curves line " + std::to_string(line_no) + ": expected 5 fields");
    const auto sim = detail::parse_number(fields[0]);
    const auto t = detail::parse_number(fields[2]);
    const auto labeled = detail::parse_number(fields[3]);
    const auto f1 = detail::parse_number(fields[4]);
    if (!sim || !t || !labeled || !f1) {
      throw std::runtime_error("learning curves line " + std::to_string(line_no) + ": malformed number");
    }
    const std::string method(detail::trim(fields[1]));
    const auto key = std::make_pair(static_cast<int>(*sim), method);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, curves.size()).first;
      curves.push_back({method, key.first, {}});
    }
    auto& points = curves[it->second].points;
    const int ti = static_cast<int>(*t);
    if (!points.empty() && ti <= points.back().t) {
      throw std::runtime_error("learning curves line " + std::to_string(line_no) + ": t not increasing");
    }
    points.push_back({ti, static_cast<std::size_t>(*labeled), *f1});
  }
  return curves;
}

std::vector<LearningCurve> read_learning_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_learning_curves(buf.str());
}

Statistics compute_statistics(const std::vector<LearningCurve>& curves, const std::vector<int>& tref_grid,
                              const std::string& reference) {
  Statistics stats;
  std::vector<std::string> methods;
  for (const auto& c : curves) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
  }
  // (t_ref, method) -> sim -> area
  std::map<std::pair<int, std::string>, std::map<int, double>> table;
  std::map<int, std::size_t> labeled_at;
  for (int t_ref : tref_grid) {
    for (const auto& c : curves) {
      if (c.points.empty() || c.points.back().t < t_ref) continue;
      AreaRow row;
      row.sim = c.sim;
      row.method = c.method;
      row.t_ref = t_ref;
      for (const auto& p : c.points) {
        if (p.t == t_ref) row.labeled = p.labeled;
      }
      row.area = curve_area(c, t_ref);
      labeled_at[t_ref] = row.labeled;
      table[{t_ref, c.method}][c.sim] = row.area;
      stats.areas.push_back(row);
    }
  }
  if (std::find(methods.begin(), methods.end(), reference) == methods.end()) return stats;
  for (int t_ref : tref_grid) {
    const auto ref_it = table.find({t_ref, reference});
    if (ref_it == table.end()) continue;
    for (const auto& other : methods) {
      if (other == reference) continue;
      const auto other_it = table.find({t_ref, other});
      if (other_it == table.end()) continue;
      std::vector<double> a;
      std::vector<double> b;
      for (const auto& [sim, area] : ref_it->second) {
        if (auto o = other_it->second.find(sim); o != other_it->second.end()) {
          a.push_back(area);
          b.push_back(o->second);
        }
      }
      WilcoxonRow row;
      row.t_ref = t_ref;
      row.labeled = labeled_at[t_ref];
      row.reference = reference;
      row.other = other;
      row.pairs = a.size();
      try {
        row.greater = wilcoxon_one_sided(a, b);
        row.less = wilcoxon_one_sided(b, a);
      } catch (const UndefinedTestError&) {
      }
      stats.tests.push_back(std::move(row));
    }
  }
  return stats;
}

std::string areas_csv(const Statistics& stats) {
  std::ostringstream o;
  o << "sim,method,t_ref,labeled,area\n";
  for (const auto& r : stats.areas) {
    o << r.sim << ',' << r.method << ',' << r.t_ref << ',' << r.labeled << ',' << format_number(r.area) << '\n';
  }
  return o.str();
}

std::string wilcoxon_csv(const Statistics& stats) {
  std::ostringstream o;
  o << "t_ref,labeled,reference,other,pairs,n,p_greater,p_less,w_plus,exact,outcome\n";
  for (const auto& r : stats.tests) {
    o << r.t_ref << ',' << r.labeled << ',' << r.reference << ',' << r.other << ',' << r.pairs << ',';
    if (!r.greater) {
      o << ",,,,,undefined\n";
      continue;
    }
    const char* outcome = r.greater->p_value < 0.05 ? "better" : (r.less->p_value < 0.05 ? "worse" : "indecisive");
    o << r.greater->n << ',' << format_number(r.greater->p_value) << ',' << format_number(r.less->p_value) << ','
      << format_number(r.greater->w_plus) << ',' << (r.greater->exact ? "exact" : "normal") << ',' << outcome
      << '\n';
  }
  return o.str();
}

std::string mean_curve_csv(const std::vector<LearningCurve>& curves) {
  std::vector<std::string> methods;
  for (const auto& c : curves) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
  }
  std::ostringstream o;
  o << "method,t,labeled,sims,mean_f1\n";
  for (const auto& m : methods) {
    std::map<int, std::pair<std::size_t, std::pair<double, std::size_t>>> acc;  // t -> (labeled, (sum, count))
    for (const auto& c : curves) {
      if (c.method != m) continue;
      for (const auto& p : c.points) {
        auto& slot = acc[p.t];
        slot.first = p.labeled;
        slot.second.first += p.metric;
        ++slot.second.second;
      }
    }
    for (const auto& [t, v] : acc) {
      o << m << ',' << t << ',' << v.first << ',' << v.second.second << ','
        << format_number(v.second.first / static_cast<double>(v.second.second)) << '\n';
    }
  }
  return o.str();
}

void write_statistics(const std::vector<LearningCurve>& curves, const std::vector<int>& tref_grid,
                      const std::filesystem::path& dir, const std::string& reference) {
  std::filesystem::create_directories(dir);
  const auto stats = compute_statistics(curves, tref_grid, reference);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("areas.csv", areas_csv(stats));
  write("wilcoxon.csv", wilcoxon_csv(stats));
  write("mean_curves.csv", mean_curve_csv(curves));
}

}  // namespace jasmine
