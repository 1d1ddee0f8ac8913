#include "mixl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mixl/errors.hpp"
#include "mixl/linalg.hpp"
#include "mixl/log.hpp"
#include "mixl/logit.hpp"

namespace mixl {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp);
    out << content;
    if (!out.flush()) throw DataError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move " + tmp + " into place: " + ec.message());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_number(const std::string& s, const std::string& what, int line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw DataError(what + " is not numeric on line " + std::to_string(line_no) + ": '" +
                    s + "'");
  }
  return v;
}

int parse_flag(const std::string& s, const std::string& what, int line_no) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  throw DataError(what + " must be 0 or 1 on line " + std::to_string(line_no) + ": '" +
                  s + "'");
}

struct SituationBuffer {
  Eigen::MatrixXd attributes;
  std::vector<std::uint8_t> available;
  std::vector<std::uint8_t> seen;
  int chosen = -1;
  bool chosen_unavailable = false;
};

}  // namespace

Dataset load_dataset(const std::string& path, const UtilitySpec& spec,
                     const DatasetSchema& schema, LoadStats* stats) {
  spec.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset is empty: " + path);
  const std::vector<std::string> header = split_csv_line(line);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_ind = col(schema.individual_col);
  const int c_group = col(schema.group_col);
  const int c_sit = col(schema.situation_col);
  const int c_alt = col(schema.alternative_col);
  const int c_chosen = col(schema.chosen_col);
  const int c_avail = col(schema.availability_col);
  if (c_ind < 0 || c_sit < 0 || c_alt < 0 || c_chosen < 0) {
    throw DataError("dataset is missing required columns (" + schema.individual_col +
                    ", " + schema.situation_col + ", " + schema.alternative_col + ", " +
                    schema.chosen_col + "): " + path);
  }
  const int num_attrs = static_cast<int>(spec.attributes.size());
  std::vector<int> c_attr(num_attrs);
  for (int a = 0; a < num_attrs; ++a) {
    c_attr[a] = col(spec.attributes[a]);
    if (c_attr[a] < 0) {
      throw DataError("dataset is missing attribute column " + spec.attributes[a] + ": " +
                      path);
    }
  }

  const int num_alts = spec.num_alternatives();
  std::vector<std::string> ind_order;
  std::map<std::string, int> ind_index;
  std::vector<std::string> ind_group;
  std::vector<std::vector<std::string>> sit_order;        // per individual
  std::vector<std::map<std::string, int>> sit_index;      // per individual
  std::vector<std::vector<SituationBuffer>> sit_buffers;  // per individual

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("wrong field count on line " + std::to_string(line_no));
    }
    const std::string& ind_id = fields[c_ind];
    const std::string group = c_group >= 0 ? fields[c_group] : ind_id;
    const std::string& sit_key = fields[c_sit];
    const std::string& alt_name = fields[c_alt];
    const int alt = spec.alternative_index(alt_name);
    if (alt < 0) {
      throw DataError("unknown alternative '" + alt_name + "' on line " +
                      std::to_string(line_no));
    }

    auto [it, inserted] = ind_index.try_emplace(ind_id, static_cast<int>(ind_order.size()));
    if (inserted) {
      ind_order.push_back(ind_id);
      ind_group.push_back(group);
      sit_order.emplace_back();
      sit_index.emplace_back();
      sit_buffers.emplace_back();
    }
    const int ni = it->second;

    auto [sit, sit_inserted] =
        sit_index[ni].try_emplace(sit_key, static_cast<int>(sit_order[ni].size()));
    if (sit_inserted) {
      sit_order[ni].push_back(sit_key);
      SituationBuffer buf;
      buf.attributes = Eigen::MatrixXd::Zero(num_alts, num_attrs);
      buf.available.assign(num_alts, 0);
      buf.seen.assign(num_alts, 0);
      sit_buffers[ni].push_back(std::move(buf));
    }
    SituationBuffer& buf = sit_buffers[ni][sit->second];
    if (buf.seen[alt]) {
      throw DataError("duplicate row for individual " + ind_id + ", situation " +
                      sit_key + ", alternative " + alt_name);
    }
    buf.seen[alt] = 1;
    const int avail = c_avail >= 0 ? parse_flag(fields[c_avail], "availability", line_no) : 1;
    buf.available[alt] = static_cast<std::uint8_t>(avail);
    for (int a = 0; a < num_attrs; ++a) {
      buf.attributes(alt, a) = parse_number(fields[c_attr[a]], spec.attributes[a], line_no);
    }
    if (parse_flag(fields[c_chosen], "chosen flag", line_no) == 1) {
      if (buf.chosen >= 0) {
        throw DataError("multiple chosen alternatives for individual " + ind_id +
                        ", situation " + sit_key);
      }
      buf.chosen = alt;
      buf.chosen_unavailable = avail == 0;
    }
  }

  Dataset dataset;
  dataset.spec = spec;
  LoadStats local;
  for (std::size_t ni = 0; ni < ind_order.size(); ++ni) {
    Individual ind;
    ind.id = ind_order[ni];
    ind.group = ind_group[ni];
    for (auto& buf : sit_buffers[ni]) {
      ++local.raw_situations;
      int avail_count = 0;
      for (auto a : buf.available) avail_count += a;
      if (buf.chosen < 0 || buf.chosen_unavailable || avail_count < 2) {
        ++local.dropped_situations;
        continue;
      }
      ChoiceSituation s;
      s.attributes = std::move(buf.attributes);
      s.available = std::move(buf.available);
      s.chosen = buf.chosen;
      ind.situations.push_back(std::move(s));
    }
    if (!ind.situations.empty()) {
      local.kept_situations += static_cast<int>(ind.situations.size());
      dataset.individuals.push_back(std::move(ind));
    }
  }
  if (local.dropped_situations > 0) {
    log_warn("dropped " + std::to_string(local.dropped_situations) + " of " +
             std::to_string(local.raw_situations) + " situations in " + path);
  }
  if (stats != nullptr) *stats = local;
  dataset.validate();
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path,
                  const DatasetSchema& schema) {
  const UtilitySpec& spec = dataset.spec;
  std::string out;
  out += schema.individual_col + "," + schema.group_col + "," + schema.situation_col +
         "," + schema.alternative_col + "," + schema.chosen_col + "," +
         schema.availability_col;
  for (const auto& a : spec.attributes) out += "," + a;
  out += "\n";
  for (const auto& ind : dataset.individuals) {
    for (std::size_t t = 0; t < ind.situations.size(); ++t) {
      const ChoiceSituation& s = ind.situations[t];
      for (int alt = 0; alt < spec.num_alternatives(); ++alt) {
        if (!s.available[alt]) continue;
        out += ind.id + "," + ind.group + ",s" + std::to_string(t) + "," +
               spec.alternatives[alt] + "," + (s.chosen == alt ? "1" : "0") + ",1";
        for (int a = 0; a < static_cast<int>(spec.attributes.size()); ++a) {
          out += "," + format_double(s.attributes(alt, a));
        }
        out += "\n";
      }
    }
  }
  write_text_file(path, out);
}

std::array<Dataset, 3> grouped_split(const Dataset& dataset, int train_groups,
                                     int validation_groups, int test_groups,
                                     std::uint64_t seed) {
  if (validation_groups < 0 || test_groups < 0) {
    throw SpecError("fold sizes must be nonnegative");
  }
  std::vector<std::string> groups;
  std::set<std::string> seen;
  for (const auto& ind : dataset.individuals) {
    if (seen.insert(ind.group).second) groups.push_back(ind.group);
  }
  const int total = static_cast<int>(groups.size());
  if (train_groups < 0) train_groups = total - validation_groups - test_groups;
  if (train_groups < 0 || train_groups + validation_groups + test_groups > total) {
    throw SpecError("fold sizes exceed the " + std::to_string(total) +
                    " groups in the dataset");
  }

  RngStream rng(seed, 0);
  for (int i = total - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform01() * (i + 1));
    std::swap(groups[i], groups[static_cast<std::size_t>(j)]);
  }

  std::map<std::string, int> fold_of;
  int cursor = 0;
  for (int i = 0; i < train_groups; ++i) fold_of[groups[cursor++]] = 0;
  for (int i = 0; i < validation_groups; ++i) fold_of[groups[cursor++]] = 1;
  for (int i = 0; i < test_groups; ++i) fold_of[groups[cursor++]] = 2;

  std::array<Dataset, 3> folds;
  for (auto& f : folds) f.spec = dataset.spec;
  for (const auto& ind : dataset.individuals) {
    const auto it = fold_of.find(ind.group);
    if (it != fold_of.end()) folds[it->second].individuals.push_back(ind);
  }
  return folds;
}

Dataset generate_synthetic(const UtilitySpec& spec, const ModelParams& truth,
                           int num_individuals, int situations_each, RngStream& rng,
                           const std::function<double(RngStream&)>& attribute_law) {
  spec.validate();
  truth.validate(spec);
  if (num_individuals < 1 || situations_each < 1) {
    throw SpecError("synthetic dataset needs at least one individual and situation");
  }
  const int p = spec.num_random();
  const int num_alts = spec.num_alternatives();
  const int num_attrs = static_cast<int>(spec.attributes.size());
  const auto kinds = spec.random_kinds();
  const Eigen::MatrixXd chol = cholesky_psd_jittered(truth.latent_cov);

  Dataset dataset;
  dataset.spec = spec;
  Eigen::VectorXd z(p);
  char id_buf[16];
  for (int n = 0; n < num_individuals; ++n) {
    std::snprintf(id_buf, sizeof(id_buf), "i%05d", n + 1);
    Individual ind;
    ind.id = id_buf;
    ind.group = ind.id;
    for (int i = 0; i < p; ++i) z[i] = rng.normal();
    const Eigen::VectorXd latent = truth.latent_mean + chol * z;
    const Eigen::VectorXd transformed = transform_latent(latent, kinds);
    for (int t = 0; t < situations_each; ++t) {
      ChoiceSituation s;
      s.attributes.resize(num_alts, num_attrs);
      for (int a = 0; a < num_alts; ++a) {
        for (int k = 0; k < num_attrs; ++k) {
          s.attributes(a, k) = attribute_law ? attribute_law(rng) : rng.normal();
        }
      }
      s.available.assign(num_alts, 1);
      const Eigen::VectorXd v = systematic_utility(spec, truth.fixed_coefs, transformed, s);
      const Eigen::VectorXd probs = choice_probabilities(v, s.available);
      const double u = rng.uniform01();
      double cum = 0.0;
      s.chosen = num_alts - 1;
      for (int a = 0; a < num_alts; ++a) {
        cum += probs[a];
        if (u < cum) {
          s.chosen = a;
          break;
        }
      }
      ind.situations.push_back(std::move(s));
    }
    dataset.individuals.push_back(std::move(ind));
  }
  dataset.validate();
  return dataset;
}

void save_model(const PriorModel& model, const std::string& path) {
  json j;
  j["version"] = 1;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(model.spec_hash));
  j["spec_hash"] = std::string(buf);
  j["alpha"] = std::vector<double>(model.params.fixed_coefs.data(),
                                   model.params.fixed_coefs.data() +
                                       model.params.fixed_coefs.size());
  j["zeta"] = std::vector<double>(model.params.latent_mean.data(),
                                  model.params.latent_mean.data() +
                                      model.params.latent_mean.size());
  json omega = json::array();
  for (Eigen::Index i = 0; i < model.params.latent_cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < model.params.latent_cov.cols(); ++k) {
      row.push_back(model.params.latent_cov(i, k));
    }
    omega.push_back(row);
  }
  j["omega"] = omega;
  j["provenance"] = model.provenance;
  j["seed"] = model.seed;
  write_text_file(path, j.dump(2) + "\n");
}

PriorModel load_model(const std::string& path, const UtilitySpec& spec) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError("model artifact is not valid json: " + path + ": " + e.what());
  }
  PriorModel model;
  try {
    if (j.at("version").get<int>() != 1) {
      throw SpecError("unsupported model artifact version in " + path);
    }
    const std::string hash = j.at("spec_hash").get<std::string>();
    if (hash != spec_hash_hex(spec)) {
      throw SpecError("model artifact " + path + " does not match the spec (hash " + hash +
                      " vs " + spec_hash_hex(spec) + ")");
    }
    model.spec_hash = spec_hash(spec);
    const auto alpha = j.at("alpha").get<std::vector<double>>();
    const auto zeta = j.at("zeta").get<std::vector<double>>();
    model.params.fixed_coefs =
        Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    model.params.latent_mean =
        Eigen::Map<const Eigen::VectorXd>(zeta.data(), static_cast<Eigen::Index>(zeta.size()));
    const auto& omega = j.at("omega");
    const int p = static_cast<int>(omega.size());
    model.params.latent_cov.resize(p, p);
    for (int i = 0; i < p; ++i) {
      const auto row = omega.at(i).get<std::vector<double>>();
      if (static_cast<int>(row.size()) != p) {
        throw DataError("omega is not square in " + path);
      }
      for (int k = 0; k < p; ++k) model.params.latent_cov(i, k) = row[k];
    }
    model.provenance = j.value("provenance", std::string());
    model.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw DataError("model artifact is missing fields: " + path + ": " + e.what());
  }
  model.params.validate(spec);
  return model;
}

}  // namespace mixl
