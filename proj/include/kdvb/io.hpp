#pragma once

// File formats. Every floating-point value is written with 17 significant
// digits so that reading a file back reproduces the doubles exactly.
// Non-finite values are written as null.

#include <filesystem>
#include <string>

#include "kdvb/evolution.hpp"
#include "kdvb/harness.hpp"
#include "kdvb/spectra.hpp"
#include "kdvb/waves.hpp"

namespace kdvb::io {

/// Writes content to path via a temporary sibling and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// {r, alpha, eps, c, L, n, coeffs: [[re, im], ...], residual}; coeffs in FFT order.
std::string profile_to_json(const WaveProfile& w);
WaveProfile profile_from_json(const std::string& text);
void save_profile(const std::filesystem::path& path, const WaveProfile& w);
WaveProfile load_profile(const std::filesystem::path& path);

/// One line per saved time: {"t": .., "norms": {"s3": ..}, "coeffs": [[re, im], ...]}.
std::string trace_to_jsonl(const EvolutionTrace& trace);
/// Metadata written next to a trace: scheme, dt, t_end, model, n, L, blow-up.
std::string trace_meta_json(const EvolutionTrace& trace);
void save_trace(const std::filesystem::path& path, const EvolutionTrace& trace);

/// Columns theta, re_lambda, im_lambda, rank; one row per eigenvalue.
std::string spectrum_to_csv(const BlochSpectrum& s);
/// {max_real, argmax_theta, N, n_theta, failed}.
std::string spectrum_summary_json(const BlochSpectrum& s);

/// {eps, c, L, lambda: [re, im], delta0, fitted_rate, verdict, times, distances,
///  fit_window, message, escape: {period, escaped_at, distances}}.
std::string report_to_json(const InstabilityReport& rep);

/// Initial data: {"L": .., "coeffs": [[re, im], ...]} or {"L": .., "samples": [...]}.
/// The grid size is the array length.
SpectralField initial_data_from_json(const std::string& text);

/// Shortest decimal form used in file names ("0.02" for 0.02).
std::string format_number(double x);

}  // namespace kdvb::io
