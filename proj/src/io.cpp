#include "biphoton/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "biphoton/errors.hpp"

namespace bp {

namespace {

constexpr char kMagic[4] = {'B', 'P', 'H', 'T'};
constexpr uint16_t kVersion = 1;

void put_u64_le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void write_bpht(const std::string& path, const std::vector<ClickStream>& streams) {
  struct Rec {
    int64_t t;
    uint8_t ch;
  };
  size_t total = 0;
  for (const auto& s : streams) total += s.t_ps.size();
  std::vector<Rec> recs;
  recs.reserve(total);
  for (const auto& s : streams) {
    if (s.channel < 0 || s.channel > 255)
      throw IoError("write_bpht: channel out of u8 range");
    for (int64_t t : s.t_ps) recs.push_back({t, static_cast<uint8_t>(s.channel)});
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const Rec& a, const Rec& b) { return a.t < b.t; });

  std::string out;
  out.reserve(6 + 9 * recs.size());
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kVersion & 0xff));
  out.push_back(static_cast<char>((kVersion >> 8) & 0xff));
  for (const auto& r : recs) {
    out.push_back(static_cast<char>(r.ch));
    put_u64_le(out, static_cast<uint64_t>(r.t));
  }
  atomic_write_text(path, out);
}

namespace {

std::vector<ClickStream> parse_csv_timestamps(const std::string& content,
                                              const std::string& path) {
  std::map<int, std::vector<int64_t>> channels;
  std::istringstream in(content);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find_first_not_of("0123456789,- \r") != std::string::npos)
      continue;  // header
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(path + ": line " + std::to_string(lineno) + ": expected channel,picoseconds");
    try {
      const int ch = std::stoi(line.substr(0, comma));
      const int64_t t = std::stoll(line.substr(comma + 1));
      channels[ch].push_back(t);
    } catch (const std::exception&) {
      throw IoError(path + ": line " + std::to_string(lineno) + ": malformed record");
    }
  }
  std::vector<ClickStream> out;
  for (auto& [ch, ts] : channels) {
    ClickStream s;
    s.channel = ch;
    s.t_ps = std::move(ts);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<ClickStream> read_timestamps(const std::string& path, int64_t duration_hint_ps) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string content = ss.str();

  std::vector<ClickStream> streams;
  if (content.size() >= 4 && std::memcmp(content.data(), kMagic, 4) == 0) {
    if (content.size() < 6) throw IoError(path + ": truncated header at byte offset 4");
    const uint16_t version = static_cast<uint8_t>(content[4]) |
                             (static_cast<uint16_t>(static_cast<uint8_t>(content[5])) << 8);
    if (version != kVersion)
      throw IoError(path + ": unsupported version " + std::to_string(version));
    const size_t body = content.size() - 6;
    if (body % 9 != 0)
      throw IoError(path + ": truncated record at byte offset " +
                    std::to_string(6 + (body / 9) * 9));
    std::map<int, std::vector<int64_t>> channels;
    std::map<int, int64_t> last;
    for (size_t off = 6; off + 9 <= content.size(); off += 9) {
      const int ch = static_cast<uint8_t>(content[off]);
      uint64_t t = 0;
      for (int i = 0; i < 8; ++i)
        t |= static_cast<uint64_t>(static_cast<uint8_t>(content[off + 1 + i])) << (8 * i);
      const int64_t ts = static_cast<int64_t>(t);
      auto it = last.find(ch);
      if (it != last.end() && ts < it->second)
        throw IoError(path + ": non-monotone timestamp on channel " + std::to_string(ch) +
                      " at byte offset " + std::to_string(off));
      last[ch] = ts;
      channels[ch].push_back(ts);
    }
    for (auto& [ch, ts] : channels) {
      ClickStream s;
      s.channel = ch;
      s.t_ps = std::move(ts);
      streams.push_back(std::move(s));
    }
  } else {
    streams = parse_csv_timestamps(content, path);
    for (auto& s : streams) std::sort(s.t_ps.begin(), s.t_ps.end());
  }

  int64_t max_t = 0;
  for (const auto& s : streams)
    if (!s.t_ps.empty()) max_t = std::max(max_t, s.t_ps.back());
  int64_t duration = duration_hint_ps > 0 ? duration_hint_ps
                                          : ((max_t / 1000000 + 1) * 1000000);  // ceil to 1 us
  for (auto& s : streams) {
    s.duration_ps = duration;
    s.seed = {0, "file:" + path};
  }
  return streams;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot create '" + tmp + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("rename failed for '" + path + "'");
}

std::string spectrum_csv(const ComplexSpectrum& spec, const std::string& fingerprint) {
  std::ostringstream o;
  o << "# spectrum: " << to_string(spec.label) << "\n";
  o << "# fingerprint: " << fingerprint << "\n";
  o << "detuning_Hz,re,im\n";
  for (size_t i = 0; i < spec.size(); ++i)
    o << fmt_double(spec.grid[i] / consts::two_pi) << "," << fmt_double(spec.values[i].real())
      << "," << fmt_double(spec.values[i].imag()) << "\n";
  return o.str();
}

std::string waveform_csv(const BiphotonWaveform& wf) {
  std::ostringstream o;
  o << "# fingerprint: " << wf.fingerprint << "\n";
  o << "tau_ns,re_psi,im_psi,intensity\n";
  for (size_t i = 0; i < wf.tau.size(); ++i)
    o << fmt_double(wf.tau[i] * 1e9) << "," << fmt_double(wf.psi[i].real()) << ","
      << fmt_double(wf.psi[i].imag()) << "," << fmt_double(wf.rate_density[i]) << "\n";
  return o.str();
}

std::string histogram_csv(const CoincidenceHistogram& hist, const std::string& fingerprint) {
  std::ostringstream o;
  o << "# fingerprint: " << fingerprint << "\n";
  o << "tau_ns,counts\n";
  for (size_t i = 0; i < hist.bins(); ++i)
    o << fmt_double(hist.tau_center_s(i) * 1e9) << "," << hist.counts[i] << "\n";
  return o.str();
}

std::string g2_csv(const G2Result& g2, const std::string& fingerprint) {
  std::ostringstream o;
  o << "# fingerprint: " << fingerprint << "\n";
  o << "tau_ns,g2,stderr\n";
  for (size_t i = 0; i < g2.g2.size(); ++i)
    o << fmt_double(g2.tau_s[i] * 1e9) << "," << fmt_double(g2.g2[i]) << ","
      << fmt_double(g2.stderr_g2[i]) << "\n";
  return o.str();
}

std::string g2c_csv(const ConditionalG2Result& g2c, const std::string& fingerprint) {
  std::ostringstream o;
  o << "# fingerprint: " << fingerprint << "\n";
  o << "width_ns,g2c,stderr\n";
  for (size_t i = 0; i < g2c.g2c.size(); ++i)
    o << fmt_double(g2c.window_widths_s[i] * 1e9) << "," << fmt_double(g2c.g2c[i]) << ","
      << fmt_double(g2c.u[i]) << "\n";
  return o.str();
}

std::string metrics_json(const WaveformMetrics& m, const std::string& fingerprint) {
  nlohmann::json j;
  j["fingerprint"] = fingerprint;
  j["tau_b_s"] = m.tau_b;
  j["fit_stderr_s"] = m.fit_stderr;
  j["one_over_e_time_s"] = m.one_over_e_time;
  j["bandwidth_Hz"] = m.bandwidth;
  j["peak_time_s"] = m.peak_time;
  j["pair_rate_per_s"] = m.pair_rate;
  return j.dump(2) + "\n";
}

std::string g2_json(const G2Result& g2, const CoincidenceHistogram& hist,
                    const ValueU& det_rate, double backed_out_rate,
                    double configured_rate, const std::string& fingerprint) {
  nlohmann::json j;
  j["fingerprint"] = fingerprint;
  j["normalization"] = g2.mode == FloorMode::measured ? "measured_floor" : "analytic_floor";
  j["bin_width_s"] = static_cast<double>(hist.bin_ps) / seconds_to_ps;
  j["window_s"] = {static_cast<double>(hist.lo_ps) / seconds_to_ps,
                   static_cast<double>(hist.hi_ps) / seconds_to_ps};
  j["duration_s"] = static_cast<double>(hist.duration_ps) / seconds_to_ps;
  j["singles"] = {{"stokes", hist.n_s}, {"anti_stokes", hist.n_as}};
  j["floor_counts_per_bin"] = g2.floor_counts;
  j["g2_max"] = {{"value", g2.g2_max.value}, {"stderr", g2.g2_max.u}};
  j["g2_max_tau_s"] = g2.tau_s.empty() ? 0.0 : g2.tau_s[g2.peak_bin];
  j["detected_pair_rate_per_s"] = {{"value", det_rate.value}, {"stderr", det_rate.u}};
  j["backed_out_generation_rate_per_s"] = backed_out_rate;
  if (configured_rate > 0) j["configured_generation_rate_per_s"] = configured_rate;
  return j.dump(2) + "\n";
}

std::string cs_json(const CSCheck& cs, const std::string& fingerprint) {
  nlohmann::json j;
  j["fingerprint"] = fingerprint;
  j["g2_s_as_max"] = {{"value", cs.g2m.value}, {"stderr", cs.g2m.u}};
  j["g2_ss_0"] = {{"value", cs.g_ss0.value}, {"stderr", cs.g_ss0.u}};
  j["g2_asas_0"] = {{"value", cs.g_asas0.value}, {"stderr", cs.g_asas0.u}};
  j["violation_factor"] = {{"value", cs.violation_factor.value},
                           {"stderr", cs.violation_factor.u}};
  j["verdict"] = cs.violated ? "violated" : "not_violated";
  return j.dump(2) + "\n";
}

std::string g2c_json(const ConditionalG2Result& r, const std::string& fingerprint) {
  nlohmann::json j;
  j["fingerprint"] = fingerprint;
  j["n_heralds"] = r.n_heralds;
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < r.g2c.size(); ++i) {
    rows.push_back({{"window_s", r.window_widths_s[i]},
                    {"g2c", r.g2c[i]},
                    {"stderr", r.u[i]},
                    {"n12", r.n12[i]},
                    {"n13", r.n13[i]},
                    {"n123", r.n123[i]}});
  }
  j["windows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace bp
