#include "mixl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "mixl/errors.hpp"
#include "mixl/gibbs.hpp"

namespace mixl {

double cel(std::span<const double> chosen_probs) {
  if (chosen_probs.empty()) throw NumericalError("cel needs at least one probability");
  double loss = 0.0;
  for (double p : chosen_probs) {
    if (!(p > 0.0) || p > 1.0) {
      throw NumericalError("probability outside (0, 1] in cel");
    }
    loss -= std::log(p);
  }
  return loss / static_cast<double>(chosen_probs.size());
}

double gmpca(std::span<const double> chosen_probs) { return std::exp(-cel(chosen_probs)); }

MetricsPair metrics_from_cel(double cel_value) {
  return MetricsPair{cel_value, std::exp(-cel_value)};
}

Stars significance_stars(double mean, double sd) {
  if (sd < 0.0) throw NumericalError("negative standard deviation");
  double z;
  if (sd == 0.0) {
    if (mean == 0.0) return Stars::None;
    z = std::numeric_limits<double>::infinity();
  } else {
    z = std::abs(mean) / sd;
  }
  if (z >= 3.2905) return Stars::Three;
  if (z >= 2.5758) return Stars::Two;
  if (z >= 1.9600) return Stars::One;
  return Stars::None;
}

const char* stars_text(Stars s) {
  switch (s) {
    case Stars::None: return "";
    case Stars::One: return "*";
    case Stars::Two: return "**";
    case Stars::Three: return "***";
  }
  return "";
}

const char* consistency_text(ConsistencyFlag f) {
  switch (f) {
    case ConsistencyFlag::Ok: return "";
    case ConsistencyFlag::Large: return "!";
    case ConsistencyFlag::Extreme: return "!!";
  }
  return "";
}

namespace {

struct NamedValue {
  std::string name;
  double value = 0.0;
  bool found = false;
};

// Coefficient value used for ratio checks: simulated mean for random
// coefficients, posterior mean for fixed ones.
NamedValue summary_value(const PosteriorSummary& s, const std::string& name) {
  for (const auto& st : s.simulated_stats) {
    if (st.name == name) return {name, st.mean, true};
  }
  for (const auto& st : s.fixed_stats) {
    if (st.name == name) return {name, st.mean, true};
  }
  return {name, 0.0, false};
}

// Flags come from the raw magnitude ratio so a factor of exactly 100 or 1000
// trips the threshold no matter how log10 rounds.
ConsistencyFlag flag_for(double magnitude_ratio) {
  if (magnitude_ratio >= 1000.0) return ConsistencyFlag::Extreme;
  if (magnitude_ratio >= 100.0) return ConsistencyFlag::Large;
  return ConsistencyFlag::Ok;
}

}  // namespace

ConsistencyReport behavioral_consistency(const PosteriorSummary& candidate,
                                         const PosteriorSummary& reference,
                                         const std::string& cost_name) {
  const NamedValue cost_cand = summary_value(candidate, cost_name);
  const NamedValue cost_ref = summary_value(reference, cost_name);
  if (!cost_cand.found || !cost_ref.found) {
    throw SpecError("cost coefficient " + cost_name + " not present in both summaries");
  }

  ConsistencyReport report;
  report.degenerate = cost_cand.value == 0.0 || cost_ref.value == 0.0;

  auto add_row = [&](const std::string& name, double value, double ref_value) {
    ConsistencyRow row;
    row.name = name;
    row.value = value;
    row.sign_error = (value > 0.0 && ref_value < 0.0) || (value < 0.0 && ref_value > 0.0);
    if (name == cost_name) {
      // The base of every ratio; only its sign is checked.
      row.ratio = 1.0;
      row.reference_ratio = 1.0;
      row.deviation = 0.0;
      row.flag = ConsistencyFlag::Ok;
      report.rows.push_back(std::move(row));
      return;
    }
    if (report.degenerate) {
      row.deviation = std::numeric_limits<double>::infinity();
      row.flag = ConsistencyFlag::Extreme;
      report.rows.push_back(std::move(row));
      return;
    }
    row.ratio = value / cost_cand.value;
    row.reference_ratio = ref_value / cost_ref.value;
    const double num = std::abs(row.ratio);
    const double den = std::abs(row.reference_ratio);
    double magnitude;  // >= 1, how far apart the two ratios are
    if (num == den) {
      magnitude = 1.0;
    } else if (num == 0.0 || den == 0.0) {
      magnitude = std::numeric_limits<double>::infinity();
    } else {
      magnitude = num > den ? num / den : den / num;
    }
    row.deviation = std::log10(magnitude);
    row.flag = flag_for(magnitude);
    report.rows.push_back(std::move(row));
  };

  for (const auto& st : candidate.simulated_stats) {
    const NamedValue ref = summary_value(reference, st.name);
    if (!ref.found) throw SpecError("coefficient " + st.name + " missing from reference");
    add_row(st.name, st.mean, ref.value);
  }
  for (const auto& st : candidate.fixed_stats) {
    const NamedValue ref = summary_value(reference, st.name);
    if (!ref.found) throw SpecError("coefficient " + st.name + " missing from reference");
    add_row(st.name, st.mean, ref.value);
  }
  return report;
}

std::vector<NamedRatio> value_of_time(const PosteriorSummary& summary,
                                      const std::vector<std::string>& time_names,
                                      const std::string& cost_name) {
  const NamedValue cost = summary_value(summary, cost_name);
  if (!cost.found) throw SpecError("cost coefficient " + cost_name + " not in summary");
  if (cost.value == 0.0) throw NumericalError("cost coefficient mean is zero");
  std::vector<NamedRatio> out;
  for (const auto& name : time_names) {
    const NamedValue v = summary_value(summary, name);
    if (!v.found) throw SpecError("coefficient " + name + " not in summary");
    out.push_back({name, v.value / cost.value});
  }
  return out;
}

std::string format_summary(const PosteriorSummary& summary) {
  std::string out = "posterior summary (" + std::to_string(summary.draw_count) +
                    " draws, epoch " + std::to_string(summary.epoch) + ")\n";
  char line[128];
  auto fmt4 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  auto emit = [&](const char* prefix, const CoefStat& st) {
    std::snprintf(line, sizeof(line), "%-28s %12s %12s  %s\n",
                  (std::string(prefix) + st.name).c_str(), fmt4(st.mean).c_str(),
                  fmt4(st.sd).c_str(), stars_text(significance_stars(st.mean, st.sd)));
    out += line;
  };
  std::snprintf(line, sizeof(line), "%-28s %12s %12s  %s\n", "coefficient", "mean", "sd",
                "sig");
  out += line;
  for (const auto& st : summary.latent_mean_stats) emit("mean:", st);
  for (const auto& st : summary.latent_sd_stats) emit("spread:", st);
  for (const auto& st : summary.simulated_stats) emit("sim:", st);
  for (const auto& st : summary.fixed_stats) emit("fixed:", st);
  return out;
}

}  // namespace mixl
