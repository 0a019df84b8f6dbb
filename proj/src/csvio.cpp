#include "nac/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

using nlohmann::json;

namespace nac {

namespace {

void append_num(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_run_log_csv(const RunLog& log, const std::string& path) {
  std::string out;
  out += "t";
  auto head = [&](const char* name, int count) {
    for (int i = 0; i < count; ++i) out += "," + std::string(name) + std::to_string(i);
  };
  head("x", static_cast<int>(log.x.rows()));
  head("xd", static_cast<int>(log.xdot.rows()));
  head("u", static_cast<int>(log.u.rows()));
  head("unn", static_cast<int>(log.u_nn.rows()));
  head("g", static_cast<int>(log.gains.rows()));
  head("err", static_cast<int>(log.err.rows()));
  out += "\n";
  for (int i = 0; i < log.steps(); ++i) {
    append_num(out, log.t[i]);
    auto block = [&](const Eigen::MatrixXd& m) {
      for (int r = 0; r < m.rows(); ++r) {
        out += ",";
        append_num(out, m(r, i));
      }
    };
    block(log.x);
    block(log.xdot);
    block(log.u);
    block(log.u_nn);
    block(log.gains);
    block(log.err);
    out += "\n";
  }
  write_text_file(path, out);
}

SampledSignal read_position_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty log " + path);
  auto cols = split(line, ',');
  std::vector<int> xcols;
  for (size_t c = 0; c < cols.size(); ++c)
    if (cols[c].rfind("x", 0) == 0 && cols[c].rfind("xd", 0) != 0) xcols.push_back(static_cast<int>(c));
  if (cols.empty() || cols[0] != "t" || xcols.empty())
    throw std::runtime_error(path + ": not a run log (need t and x* columns)");

  std::vector<double> times;
  std::vector<std::vector<double>> values;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto items = split(line, ',');
    times.push_back(std::stod(items[0]));
    std::vector<double> row;
    for (int c : xcols) row.push_back(std::stod(items[c]));
    values.push_back(std::move(row));
  }
  SampledSignal sig;
  sig.times = times;
  sig.values.resize(static_cast<int>(xcols.size()), static_cast<int>(times.size()));
  for (size_t i = 0; i < values.size(); ++i)
    for (size_t d = 0; d < values[i].size(); ++d)
      sig.values(static_cast<int>(d), static_cast<int>(i)) = values[i][d];
  sig.validate();
  return sig;
}

void write_training_csv(const TrainingTriplets& data, const std::string& csv_path,
                        const std::string& meta_path) {
  std::string out;
  out += "trajectory_id,t";
  for (int i = 0; i < data.xbar.rows(); ++i) out += ",xbar" + std::to_string(i);
  for (int i = 0; i < data.u.rows(); ++i) out += ",u" + std::to_string(i);
  out += "\n";
  for (int i = 0; i < data.count(); ++i) {
    out += std::to_string(data.traj_id[i]) + ",";
    append_num(out, data.t[i]);
    for (int r = 0; r < data.xbar.rows(); ++r) {
      out += ",";
      append_num(out, data.xbar(r, i));
    }
    for (int r = 0; r < data.u.rows(); ++r) {
      out += ",";
      append_num(out, data.u(r, i));
    }
    out += "\n";
  }
  write_text_file(csv_path, out);

  json meta;
  meta["format"] = "nac-data-meta";
  meta["version"] = 1;
  meta["scenario"] = to_string(data.kind);
  json trajs = json::array();
  for (const auto& tr : data.trajectories)
    trajs.push_back({{"id", tr.id}, {"t_f1", tr.t_f1}, {"t_f2", tr.t_f2}});
  meta["trajectories"] = trajs;
  write_text_file(meta_path, meta.dump(2));
}

TrainingTriplets read_training_csv(const std::string& csv_path,
                                   const std::string& meta_path) {
  json meta = json::parse(read_text_file(meta_path));
  if (meta.at("format").get<std::string>() != "nac-data-meta")
    throw std::runtime_error(meta_path + ": not a data meta file");
  TrainingTriplets data;
  data.kind = plant_kind_from_string(meta.at("scenario").get<std::string>());
  for (const auto& tr : meta.at("trajectories"))
    data.trajectories.push_back({tr.at("id").get<int>(), tr.at("t_f1").get<double>(),
                                 tr.at("t_f2").get<double>()});

  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("cannot read " + csv_path);
  std::string line;
  std::getline(f, line);
  auto cols = split(line, ',');
  int n_xbar = 0, n_u = 0;
  for (const auto& c : cols) {
    if (c.rfind("xbar", 0) == 0) ++n_xbar;
    if (c.rfind("u", 0) == 0 && c != "u") ++n_u;
    if (c == "u") ++n_u;
  }
  std::vector<std::vector<double>> xrows, urows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto items = split(line, ',');
    data.traj_id.push_back(std::stoi(items[0]));
    data.t.push_back(std::stod(items[1]));
    std::vector<double> xr, ur;
    for (int i = 0; i < n_xbar; ++i) xr.push_back(std::stod(items[2 + i]));
    for (int i = 0; i < n_u; ++i) ur.push_back(std::stod(items[2 + n_xbar + i]));
    xrows.push_back(std::move(xr));
    urows.push_back(std::move(ur));
  }
  data.xbar.resize(n_xbar, static_cast<int>(xrows.size()));
  data.u.resize(n_u, static_cast<int>(urows.size()));
  for (size_t i = 0; i < xrows.size(); ++i) {
    for (int r = 0; r < n_xbar; ++r) data.xbar(r, static_cast<int>(i)) = xrows[i][r];
    for (int r = 0; r < n_u; ++r) data.u(r, static_cast<int>(i)) = urows[i][r];
  }
  return data;
}

}  // namespace nac
