#pragma once

#include <span>
#include <string>
#include <vector>

namespace mixl {

struct PosteriorSummary;

// Cross-entropy loss: mean negative log of the chosen-alternative
// probabilities. Throws NumericalError if any probability is not in (0, 1].
double cel(std::span<const double> chosen_probs);

// Geometric mean probability of correct assignment, exp(-cel).
double gmpca(std::span<const double> chosen_probs);

struct MetricsPair {
  double cel = 0.0;
  double gmpca = 1.0;
};

MetricsPair metrics_from_cel(double cel_value);

// Two-sided normal significance levels on mean/sd: 95, 99, 99.9 percent.
enum class Stars { None = 0, One = 1, Two = 2, Three = 3 };
Stars significance_stars(double mean, double sd);
const char* stars_text(Stars s);

// Order-of-magnitude drift of a coefficient ratio against a reference model.
enum class ConsistencyFlag { Ok = 0, Large = 1, Extreme = 2 };  // "", "!", "!!"
const char* consistency_text(ConsistencyFlag f);

struct ConsistencyRow {
  std::string name;
  double value = 0.0;            // candidate coefficient (simulated mean or fixed mean)
  double ratio = 0.0;            // value / cost value
  double reference_ratio = 0.0;
  double deviation = 0.0;        // |log10(ratio / reference ratio)|, magnitudes only
  bool sign_error = false;
  ConsistencyFlag flag = ConsistencyFlag::Ok;
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  bool degenerate = false;  // a cost mean of zero flags every ratio
};

// Ratio-to-cost drift and sign agreement of every coefficient against a
// reference summary. Random coefficients compare simulated means, fixed
// coefficients compare their posterior means. The cost coefficient itself is
// checked for sign only. Throws SpecError if the cost name is missing from
// either summary.
ConsistencyReport behavioral_consistency(const PosteriorSummary& candidate,
                                         const PosteriorSummary& reference,
                                         const std::string& cost_name);

struct NamedRatio {
  std::string name;
  double ratio = 0.0;
};

// Willingness-to-pay style ratios: each named coefficient's mean over the
// cost coefficient's simulated mean.
std::vector<NamedRatio> value_of_time(const PosteriorSummary& summary,
                                      const std::vector<std::string>& time_names,
                                      const std::string& cost_name);

// Fixed-width estimates table with significance stars. Pure function of the
// summary, so identical results print identical bytes.
std::string format_summary(const PosteriorSummary& summary);

}  // namespace mixl
