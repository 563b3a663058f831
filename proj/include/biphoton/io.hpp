#pragma once

#include <string>
#include <vector>

#include "biphoton/biphoton.hpp"
#include "biphoton/correlation.hpp"
#include "biphoton/detection.hpp"

namespace bp {

// Binary timestamp format: magic "BPHT", version as 16-bit little-endian,
// then fixed 9-byte records (channel u8, timestamp in integer picoseconds as
// u64 little-endian), nondecreasing per channel. Records are written merged in
// time order across channels.
void write_bpht(const std::string& path, const std::vector<ClickStream>& streams);

// Reads BPHT or the CSV alternative "channel,picoseconds" (auto-detected).
// Malformed input throws IoError naming the byte offset. duration_hint_ps > 0
// overrides the duration (otherwise the last timestamp, rounded up to 1 us).
std::vector<ClickStream> read_timestamps(const std::string& path,
                                         int64_t duration_hint_ps = 0);

// Atomic text write: temp file in the same directory, then rename.
void atomic_write_text(const std::string& path, const std::string& content);

std::string spectrum_csv(const ComplexSpectrum& spec, const std::string& fingerprint);
std::string waveform_csv(const BiphotonWaveform& wf);
std::string histogram_csv(const CoincidenceHistogram& hist, const std::string& fingerprint);
std::string g2_csv(const G2Result& g2, const std::string& fingerprint);
std::string g2c_csv(const ConditionalG2Result& g2c, const std::string& fingerprint);

std::string metrics_json(const WaveformMetrics& m, const std::string& fingerprint);
std::string g2_json(const G2Result& g2, const CoincidenceHistogram& hist,
                    const ValueU& det_rate, double backed_out_rate,
                    double configured_rate, const std::string& fingerprint);
std::string cs_json(const CSCheck& cs, const std::string& fingerprint);
std::string g2c_json(const ConditionalG2Result& r, const std::string& fingerprint);

}  // namespace bp
