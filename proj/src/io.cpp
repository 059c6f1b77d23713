#include "io.hpp"

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace regfilt {

namespace {

constexpr double kMmPerMeter = 1000.0;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(s);
  while (std::getline(stream, token, sep)) out.push_back(trim(token));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& token, const std::string& context) {
  const std::string t = trim(token);
  if (t.empty()) fail(ErrorCode::parse, context + ": empty numeric field");
  try {
    std::size_t consumed = 0;
    const double value = std::stod(t, &consumed);
    if (consumed != t.size()) fail(ErrorCode::parse, context + ": trailing characters in '" + t + "'");
    if (!std::isfinite(value)) fail(ErrorCode::parse, context + ": non-finite value '" + t + "'");
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, context + ": cannot parse number '" + t + "'");
  }
}

long long parse_int(const std::string& token, const std::string& context) {
  const std::string t = trim(token);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    fail(ErrorCode::parse, context + ": cannot parse integer '" + t + "'");
  }
  return value;
}

bool parse_bool(const std::string& token, const std::string& context) {
  const std::string t = trim(token);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(ErrorCode::parse, context + ": cannot parse boolean '" + t + "'");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open file: " + path);
  return in;
}

std::string format_full_precision(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

Correspondences load_correspondences(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;

  // Header row is mandatory and fixes the column count.
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto header = split(line, ',');
    static const std::array<std::string, 9> expected = {"sx", "sy", "sz", "tx", "ty",
                                                        "tz", "ssx", "ssy", "ssz"};
    if (header.size() != 6 && header.size() != 9) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                 ": header must name 6 or 9 columns");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] != expected[i]) {
        fail(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": unexpected column '" +
                                   header[i] + "' (expected '" + expected[i] + "')");
      }
    }
    columns = header.size();
    break;
  }
  if (columns == 0) fail(ErrorCode::parse, path + ": missing header row");

  Correspondences corrs;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    const std::string context = path + ":" + std::to_string(line_no);
    if (fields.size() != columns) {
      fail(ErrorCode::parse, context + ": expected " + std::to_string(columns) +
                                 " columns, got " + std::to_string(fields.size()));
    }
    Correspondence c;
    c.source = Vec3(parse_double(fields[0], context), parse_double(fields[1], context),
                    parse_double(fields[2], context)) /
               kMmPerMeter;
    c.target = Vec3(parse_double(fields[3], context), parse_double(fields[4], context),
                    parse_double(fields[5], context)) /
               kMmPerMeter;
    if (columns == 9) {
      const Vec3 sigma = Vec3(parse_double(fields[6], context), parse_double(fields[7], context),
                              parse_double(fields[8], context)) /
                         kMmPerMeter;
      if ((sigma.array() < 0.0).any()) {
        fail(ErrorCode::parse, context + ": sigma columns must be nonnegative");
      }
      c.sigma = sigma;
    }
    corrs.push_back(c);
  }
  if (corrs.empty()) fail(ErrorCode::empty_input, path + ": no correspondence rows");
  return corrs;
}

void save_correspondences(const std::string& path, const Correspondences& corrs) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write file: " + path);
  const bool with_sigma =
      std::any_of(corrs.begin(), corrs.end(), [](const Correspondence& c) { return c.sigma.has_value(); });
  out << "sx,sy,sz,tx,ty,tz";
  if (with_sigma) out << ",ssx,ssy,ssz";
  out << "\n";
  for (const Correspondence& c : corrs) {
    const Vec3 s = c.source * kMmPerMeter;
    const Vec3 t = c.target * kMmPerMeter;
    out << format_full_precision(s.x()) << ',' << format_full_precision(s.y()) << ','
        << format_full_precision(s.z()) << ',' << format_full_precision(t.x()) << ','
        << format_full_precision(t.y()) << ',' << format_full_precision(t.z());
    if (with_sigma) {
      const Vec3 sg = (c.sigma ? *c.sigma : Vec3::Zero()) * kMmPerMeter;
      out << ',' << format_full_precision(sg.x()) << ',' << format_full_precision(sg.y()) << ','
          << format_full_precision(sg.z());
    }
    out << "\n";
  }
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

std::vector<Vec3> load_ply_points(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line) || trim(line) != "ply") {
    fail(ErrorCode::parse, path + ": not a PLY file (missing 'ply' magic)");
  }
  ++line_no;

  long long vertex_count = -1;
  bool in_vertex_element = false;
  std::vector<std::string> vertex_properties;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t == "end_header") break;
    const auto tokens = split(t, ' ');
    std::vector<std::string> words;
    for (const auto& w : tokens) {
      if (!w.empty()) words.push_back(w);
    }
    if (words.empty() || words[0] == "comment") continue;
    if (words[0] == "format") {
      if (words.size() < 2 || words[1] != "ascii") {
        fail(ErrorCode::parse, path + ": only ascii PLY is supported");
      }
    } else if (words[0] == "element") {
      in_vertex_element = words.size() >= 3 && words[1] == "vertex";
      if (in_vertex_element) vertex_count = parse_int(words[2], path + ":" + std::to_string(line_no));
    } else if (words[0] == "property" && in_vertex_element) {
      if (words.size() >= 3) vertex_properties.push_back(words.back());
    }
  }
  if (vertex_count < 0) fail(ErrorCode::parse, path + ": no vertex element in header");

  // Locate x, y, z among the declared vertex properties.
  std::array<int, 3> xyz = {-1, -1, -1};
  for (std::size_t i = 0; i < vertex_properties.size(); ++i) {
    if (vertex_properties[i] == "x") xyz[0] = static_cast<int>(i);
    if (vertex_properties[i] == "y") xyz[1] = static_cast<int>(i);
    if (vertex_properties[i] == "z") xyz[2] = static_cast<int>(i);
  }
  if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0) {
    fail(ErrorCode::parse, path + ": vertex element lacks x/y/z properties");
  }

  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(vertex_count));
  while (static_cast<long long>(points.size()) < vertex_count && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::vector<double> values;
    double v = 0.0;
    while (row >> v) values.push_back(v);
    if (values.size() < vertex_properties.size()) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": short vertex row");
    }
    points.emplace_back(values[static_cast<std::size_t>(xyz[0])],
                        values[static_cast<std::size_t>(xyz[1])],
                        values[static_cast<std::size_t>(xyz[2])]);
  }
  if (static_cast<long long>(points.size()) != vertex_count) {
    fail(ErrorCode::parse, path + ": vertex data ended early");
  }
  return points;
}

std::vector<std::pair<std::size_t, std::size_t>> load_pair_indices(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream row(t);
    long long a = 0;
    long long b = 0;
    if (!(row >> a >> b) || a < 0 || b < 0) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": expected two indices");
    }
    pairs.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  if (pairs.empty()) fail(ErrorCode::empty_input, path + ": no index pairs");
  return pairs;
}

Correspondences correspondences_from_ply(const std::string& source_ply,
                                         const std::string& target_ply,
                                         const std::string& pairs_path) {
  const auto sources = load_ply_points(source_ply);
  const auto targets = load_ply_points(target_ply);
  const auto pairs = load_pair_indices(pairs_path);
  Correspondences corrs;
  corrs.reserve(pairs.size());
  for (const auto& [si, ti] : pairs) {
    if (si >= sources.size() || ti >= targets.size()) {
      fail(ErrorCode::parse, pairs_path + ": index pair (" + std::to_string(si) + ", " +
                                 std::to_string(ti) + ") out of range");
    }
    corrs.push_back({sources[si], targets[ti], std::nullopt});
  }
  return corrs;
}

std::vector<double> load_depths(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<double> depths;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string context = path + ":" + std::to_string(line_no);
    if (t.find(',') != std::string::npos) {
      for (const std::string& field : split(t, ',')) {
        if (!field.empty()) depths.push_back(parse_double(field, context));
      }
    } else {
      depths.push_back(parse_double(t, context));
    }
  }
  if (depths.empty()) fail(ErrorCode::empty_input, path + ": no depth values");
  return depths;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in = open_input(path);
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string context = "config key '" + key + "'";
  if (key == "method") {
    method_from_name(value);  // validates
    method = value;
  } else if (key == "methods") {
    std::vector<std::string> parsed;
    for (const std::string& m : split(value, ',')) {
      method_from_name(m);
      parsed.push_back(m);
    }
    if (parsed.empty()) fail(ErrorCode::parse, context + ": empty method list");
    methods = parsed;
  } else if (key == "noise") {
    for (const std::string& n : split(value, ',')) {
      if (n != "small" && n != "average" && n != "large" && n != "custom") {
        fail(ErrorCode::parse, context + ": unknown noise band '" + n + "'");
      }
    }
    noise = value;
  } else if (key == "sigma_min_mm") {
    sigma_min_mm = parse_double(value, context);
  } else if (key == "sigma_max_mm") {
    sigma_max_mm = parse_double(value, context);
  } else if (key == "anisotropic") {
    anisotropic = parse_bool(value, context);
  } else if (key == "points") {
    points = static_cast<int>(parse_int(value, context));
  } else if (key == "samples") {
    samples = static_cast<int>(parse_int(value, context));
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(parse_int(value, context));
  } else if (key == "process_sigma") {
    kf.process_sigma = parse_double(value, context);
  } else if (key == "measurement_sigma") {
    const auto fields = split(value, ',');
    if (fields.size() == 1) {
      kf.measurement_sigma = Vec3::Constant(parse_double(fields[0], context));
    } else if (fields.size() == 3) {
      kf.measurement_sigma = Vec3(parse_double(fields[0], context),
                                  parse_double(fields[1], context),
                                  parse_double(fields[2], context));
    } else {
      fail(ErrorCode::parse, context + ": expected 1 or 3 comma-separated values");
    }
  } else if (key == "prior_covariance_scale") {
    kf.prior_covariance_scale = parse_double(value, context);
  } else if (key == "sweeps") {
    kf.sweeps = static_cast<int>(parse_int(value, context));
  } else if (key == "reproject_every") {
    kf.reproject_every = static_cast<int>(parse_int(value, context));
  } else if (key == "shuffle_seed") {
    if (trim(value).empty()) {
      kf.shuffle_seed.reset();
    } else {
      kf.shuffle_seed = static_cast<std::uint64_t>(parse_int(value, context));
    }
  } else if (key == "estimate_scale") {
    kf.estimate_scale = parse_bool(value, context);
  } else if (key == "scale_per_term") {
    kf.scale_per_term = parse_bool(value, context);
  } else if (key == "translation_in_state") {
    kf.translation_in_state = parse_bool(value, context);
  } else if (key == "record_states") {
    kf.record_states = parse_bool(value, context);
  } else if (key == "theta") {
    rf.theta = parse_double(value, context);
  } else if (key == "theta_backoff") {
    rf.theta_backoff = parse_double(value, context);
  } else if (key == "max_backoffs") {
    rf.max_backoffs = static_cast<int>(parse_int(value, context));
  } else if (key == "diagnostics") {
    rf.diagnostics = parse_bool(value, context);
  } else if (key == "sigma_a") {
    sigma_a = parse_double(value, context);
    has_sigma_a = true;
  } else if (key == "rf_uncertainty") {
    if (value != "points" && value != "none") {
      fail(ErrorCode::parse, context + ": expected 'points' or 'none'");
    }
    rf_uncertainty = value;
  } else if (key == "covariance_form") {
    if (value != "outer" && value != "diagonal") {
      fail(ErrorCode::parse, context + ": expected 'outer' or 'diagonal'");
    }
    covariance_form = value;
  } else if (key == "intrinsics") {
    const auto fields = split(value, ',');
    if (fields.size() != 4) fail(ErrorCode::parse, context + ": expected fx,fy,cx,cy");
    intrinsics = {parse_double(fields[0], context), parse_double(fields[1], context),
                  parse_double(fields[2], context), parse_double(fields[3], context)};
    has_intrinsics = true;
  } else if (key == "merge_epsilon") {
    merge_epsilon = parse_double(value, context);
  } else if (key == "zlevel_offset") {
    zlevel_offset = static_cast<int>(parse_int(value, context));
  } else {
    fail(ErrorCode::parse, "unknown config key '" + key + "'");
  }
}

std::string RunConfig::get(const std::string& key) const {
  const auto join = [](const std::vector<std::string>& parts) {
    std::string out;
    for (const std::string& p : parts) {
      if (!out.empty()) out += ',';
      out += p;
    }
    return out;
  };
  const auto triple = [](const Vec3& v) {
    return format_full_precision(v.x()) + "," + format_full_precision(v.y()) + "," +
           format_full_precision(v.z());
  };
  const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };

  if (key == "method") return method;
  if (key == "methods") return join(methods);
  if (key == "noise") return noise;
  if (key == "sigma_min_mm") return format_full_precision(sigma_min_mm);
  if (key == "sigma_max_mm") return format_full_precision(sigma_max_mm);
  if (key == "anisotropic") return flag(anisotropic);
  if (key == "points") return std::to_string(points);
  if (key == "samples") return std::to_string(samples);
  if (key == "seed") return std::to_string(seed);
  if (key == "process_sigma") return format_full_precision(kf.process_sigma);
  if (key == "measurement_sigma") return triple(kf.measurement_sigma);
  if (key == "prior_covariance_scale") return format_full_precision(kf.prior_covariance_scale);
  if (key == "sweeps") return std::to_string(kf.sweeps);
  if (key == "reproject_every") return std::to_string(kf.reproject_every);
  if (key == "shuffle_seed") return kf.shuffle_seed ? std::to_string(*kf.shuffle_seed) : "";
  if (key == "estimate_scale") return flag(kf.estimate_scale);
  if (key == "scale_per_term") return flag(kf.scale_per_term);
  if (key == "translation_in_state") return flag(kf.translation_in_state);
  if (key == "record_states") return flag(kf.record_states);
  if (key == "theta") return format_full_precision(rf.theta);
  if (key == "theta_backoff") return format_full_precision(rf.theta_backoff);
  if (key == "max_backoffs") return std::to_string(rf.max_backoffs);
  if (key == "diagnostics") return flag(rf.diagnostics);
  if (key == "sigma_a") return has_sigma_a ? format_full_precision(sigma_a) : "";
  if (key == "rf_uncertainty") return rf_uncertainty;
  if (key == "covariance_form") return covariance_form;
  if (key == "intrinsics") {
    if (!has_intrinsics) return "";
    return format_full_precision(intrinsics.fx) + "," + format_full_precision(intrinsics.fy) +
           "," + format_full_precision(intrinsics.cx) + "," + format_full_precision(intrinsics.cy);
  }
  if (key == "merge_epsilon") return format_full_precision(merge_epsilon);
  if (key == "zlevel_offset") return std::to_string(zlevel_offset);
  fail(ErrorCode::parse, "unknown config key '" + key + "'");
}

NoiseProfile RunConfig::noise_profile() const {
  if (noise == "custom") {
    return NoiseProfile::custom(sigma_min_mm / kMmPerMeter, sigma_max_mm / kMmPerMeter,
                                anisotropic);
  }
  NoiseProfile p = NoiseProfile::named(noise);
  p.anisotropic = anisotropic;
  return p;
}

UncertaintyModel RunConfig::uncertainty() const {
  if (rf_uncertainty == "none") return UncertaintyModel::none();
  return UncertaintyModel::from_point_sigmas(has_sigma_a ? sigma_a : kf.process_sigma);
}

RfConfig RunConfig::rf_config() const {
  RfConfig cfg = rf;
  cfg.kf = kf;
  return cfg;
}

nlohmann::ordered_json transform_to_json(const RigidTransform& t) {
  nlohmann::ordered_json j;
  j["r"] = std::vector<double>{t.rotation(0, 0), t.rotation(0, 1), t.rotation(0, 2),
                               t.rotation(1, 0), t.rotation(1, 1), t.rotation(1, 2),
                               t.rotation(2, 0), t.rotation(2, 1), t.rotation(2, 2)};
  j["t_mm"] = std::vector<double>{t.translation.x() * kMmPerMeter,
                                  t.translation.y() * kMmPerMeter,
                                  t.translation.z() * kMmPerMeter};
  j["s"] = t.scale;
  return j;
}

RigidTransform transform_from_json(const nlohmann::json& j) {
  const auto r = j.at("r").get<std::vector<double>>();
  const auto t_mm = j.at("t_mm").get<std::vector<double>>();
  if (r.size() != 9 || t_mm.size() != 3) {
    fail(ErrorCode::parse, "transform JSON: expected 9 rotation and 3 translation entries");
  }
  RigidTransform t;
  t.rotation << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
  t.translation = Vec3(t_mm[0], t_mm[1], t_mm[2]) / kMmPerMeter;
  t.scale = j.value("s", 1.0);
  return t;
}

namespace {

nlohmann::ordered_json meta_json(std::uint64_t seed) {
  nlohmann::ordered_json meta;
  meta["seed"] = seed;
  meta["version"] = kVersion;
  meta["unit"] = "mm";
  return meta;
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

nlohmann::ordered_json report_to_json(const BenchReport& report) {
  nlohmann::ordered_json j;
  j["meta"] = meta_json(report.seed);
  j["meta"]["points"] = report.points;
  j["meta"]["samples"] = report.samples;
  j["meta"]["note"] = report.note;
  j["rows"] = nlohmann::ordered_json::array();
  for (const BenchRow& row : report.rows) {
    nlohmann::ordered_json r;
    r["method"] = row.method;
    r["scenario"] = row.scenario;
    r["rmse_mean_mm"] = number_or_null(row.rmse_mean_mm);
    r["rmse_stddev_mm"] = number_or_null(row.rmse_stddev_mm);
    r["time_mean_ms"] = number_or_null(row.time_mean_ms);
    r["samples"] = row.samples;
    r["failures"] = row.failures;
    j["rows"].push_back(std::move(r));
  }
  if (!report.reference_rows.empty()) {
    j["reference_rows"] = nlohmann::ordered_json::array();
    for (const ReferenceRow& row : report.reference_rows) {
      nlohmann::ordered_json r;
      r["method"] = row.method;
      r["scenario"] = row.scenario;
      r["rmse_mm"] = row.rmse_mm;
      r["note"] = "published reference, not computed";
      j["reference_rows"].push_back(std::move(r));
    }
  }
  return j;
}

nlohmann::ordered_json result_to_json(const RegistrationResult& result, const std::string& method,
                                      const std::string& scenario, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["meta"] = meta_json(seed);
  j["rows"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json row;
  row["method"] = method;
  row["scenario"] = scenario;
  row["rmse_mean_mm"] = result.rmse * kMmPerMeter;
  row["rmse_stddev_mm"] = 0.0;
  row["time_mean_ms"] = nullptr;
  row["samples"] = 1;
  row["failures"] = 0;
  j["rows"].push_back(std::move(row));
  j["transform"] = transform_to_json(result.transform);
  j["register"] = {{"steps", result.steps}, {"under_determined", result.under_determined}};
  return j;
}

namespace {

std::string cell(double v) {
  if (std::isnan(v)) return "-";
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

void append_row(std::string& out, const std::vector<std::string>& cells, std::size_t width) {
  for (const std::string& c : cells) {
    out += c;
    if (c.size() < width) out.append(width - c.size(), ' ');
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  out += '\n';
}

}  // namespace

std::string report_to_table(const BenchReport& report) {
  // Pivot: scenarios as rows, methods as columns, reference columns first.
  std::vector<std::string> scenarios;
  std::vector<std::string> methods;
  for (const BenchRow& row : report.rows) {
    if (std::find(scenarios.begin(), scenarios.end(), row.scenario) == scenarios.end()) {
      scenarios.push_back(row.scenario);
    }
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
  }
  std::vector<std::string> reference_methods;
  for (const ReferenceRow& row : report.reference_rows) {
    if (std::find(reference_methods.begin(), reference_methods.end(), row.method) ==
        reference_methods.end()) {
      reference_methods.push_back(row.method);
    }
  }

  const auto find_row = [&](const std::string& m, const std::string& s) -> const BenchRow* {
    for (const BenchRow& row : report.rows) {
      if (row.method == m && row.scenario == s) return &row;
    }
    return nullptr;
  };
  const auto find_reference = [&](const std::string& m, const std::string& s) -> const ReferenceRow* {
    for (const ReferenceRow& row : report.reference_rows) {
      if (row.method == m && row.scenario == s) return &row;
    }
    return nullptr;
  };

  constexpr std::size_t width = 14;
  std::string out;
  out += "registration benchmark: seed " + std::to_string(report.seed) + ", " +
         std::to_string(report.points) + " points x " + std::to_string(report.samples) +
         " samples\n";
  out += report.note + "\n\n";

  out += "rmse mean (mm)\n";
  std::vector<std::string> header{"scenario"};
  for (const std::string& m : reference_methods) header.push_back(m + "*");
  for (const std::string& m : methods) header.push_back(m);
  append_row(out, header, width);
  for (const std::string& s : scenarios) {
    std::vector<std::string> cells{s};
    for (const std::string& m : reference_methods) {
      const ReferenceRow* ref = find_reference(m, s);
      cells.push_back(ref ? cell(ref->rmse_mm) : "-");
    }
    for (const std::string& m : methods) {
      const BenchRow* row = find_row(m, s);
      cells.push_back(row ? cell(row->rmse_mean_mm) : "-");
    }
    append_row(out, cells, width);
  }

  out += "\ntime mean (ms)\n";
  header = {"scenario"};
  for (const std::string& m : methods) header.push_back(m);
  append_row(out, header, width);
  for (const std::string& s : scenarios) {
    std::vector<std::string> cells{s};
    for (const std::string& m : methods) {
      const BenchRow* row = find_row(m, s);
      cells.push_back(row ? cell(row->time_mean_ms) : "-");
    }
    append_row(out, cells, width);
  }

  if (!reference_methods.empty()) {
    out += "\n* published reference values, not computed by this tool\n";
  }
  return out;
}

std::string result_to_table(const RegistrationResult& result, const std::string& method) {
  std::ostringstream out;
  out << "method: " << method << "\n";
  out << "rmse_mm: " << std::setprecision(12) << result.rmse * kMmPerMeter << "\n";
  out << "steps: " << result.steps << "\n";
  out << "under_determined: " << (result.under_determined ? "true" : "false") << "\n";
  out << "rotation:\n" << std::setprecision(12) << result.transform.rotation << "\n";
  out << "translation_mm: " << (result.transform.translation * kMmPerMeter).transpose() << "\n";
  out << "scale: " << result.transform.scale << "\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write file: " + path);
  out << content;
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

}  // namespace regfilt
