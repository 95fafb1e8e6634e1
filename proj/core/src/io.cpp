#include "bclab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bclab {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  return fnv1a64(read_text_file(path));
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trace_csv_body(const HitTrace& trace) {
  std::string body = "checkpoint,S,E,ratio\n";
  for (std::size_t k = 0; k < trace.checkpoints.size(); ++k) {
    double ratio = trace.E[k] > 0.0 ? static_cast<double>(trace.S[k]) / trace.E[k] : 0.0;
    body += std::to_string(trace.checkpoints[k]);
    body += ',';
    body += std::to_string(trace.S[k]);
    body += ',';
    body += fmt_g17(trace.E[k]);
    body += ',';
    body += fmt_g17(ratio);
    body += '\n';
  }
  return body;
}

void write_trace_csv(const HitTrace& trace, const std::filesystem::path& path) {
  write_text_file(path, trace_csv_body(trace));
}

void write_correlation_csv(const CorrelationCurve& curve, const std::filesystem::path& path) {
  std::string body = "lag,estimate,stderr\n";
  for (std::size_t k = 0; k < curve.lags.size(); ++k) {
    body += std::to_string(curve.lags[k]);
    body += ',';
    body += fmt_g17(curve.estimate[k]);
    body += ',';
    body += fmt_g17(curve.stderr_[k]);
    body += '\n';
  }
  write_text_file(path, body);
}

void write_returns_csv(const ReturnSample& sample, const std::filesystem::path& path) {
  std::string body = "tau,normalized\n";
  for (std::uint64_t tau : sample.taus) {
    body += std::to_string(tau);
    body += ',';
    body += fmt_g17(static_cast<double>(tau) * sample.mu_hat);
    body += '\n';
  }
  write_text_file(path, body);
}

}  // namespace bclab
