#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "forestmap/svm.hpp"

namespace forestmap {
namespace {

constexpr const char* kMagic = "forestmap-svm-model";
constexpr int kVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& token) {
  double v = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size()) {
    throw Error(Errc::InvalidArgument, "bad number in model file: " + token);
  }
  return v;
}

std::vector<std::string> expect_line(std::istream& in, const std::string& key, std::size_t count) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::InvalidArgument, "model file ends before " + key);
  std::istringstream fields(line);
  std::string head;
  fields >> head;
  if (head != key) throw Error(Errc::InvalidArgument, "expected '" + key + "', found '" + head + "'");
  std::vector<std::string> tokens;
  for (std::string tok; fields >> tok;) tokens.push_back(tok);
  if (tokens.size() != count) throw Error(Errc::InvalidArgument, "wrong value count for " + key);
  return tokens;
}

template <typename Range>
void put_line(std::ostream& out, const char* key, const Range& values) {
  out << key;
  for (const auto& v : values) out << ' ' << v;
  out << '\n';
}

}  // namespace

void write_model(const SvmModel<double>& model, std::ostream& out) {
  const Eigen::Index f = model.features();
  std::vector<std::string> mean, scale, degenerate, w;
  for (Eigen::Index j = 0; j < f; ++j) {
    mean.push_back(format_double(model.scaler.mean[j]));
    scale.push_back(format_double(model.scaler.scale[j]));
    degenerate.push_back(model.scaler.degenerate[j] ? "1" : "0");
    w.push_back(format_double(model.w[j]));
  }
  out << kMagic << ' ' << kVersion << '\n';
  out << "features " << f << '\n';
  put_line(out, "names", model.feature_names);
  put_line(out, "mean", mean);
  put_line(out, "scale", scale);
  put_line(out, "degenerate", degenerate);
  put_line(out, "weights", w);
  out << "bias " << format_double(model.b) << '\n';
}

SvmModel<double> read_model(std::istream& in) {
  const auto version = expect_line(in, kMagic, 1);
  if (version[0] != std::to_string(kVersion)) {
    throw Error(Errc::UnsupportedFormat, "model version " + version[0]);
  }
  const auto f = static_cast<std::size_t>(parse_double(expect_line(in, "features", 1)[0]));
  SvmModel<double> model;
  model.feature_names = expect_line(in, "names", f);
  const auto mean = expect_line(in, "mean", f);
  const auto scale = expect_line(in, "scale", f);
  const auto degenerate = expect_line(in, "degenerate", f);
  const auto w = expect_line(in, "weights", f);
  model.scaler = Scaler<double>::identity(static_cast<Eigen::Index>(f));
  model.w.resize(static_cast<Eigen::Index>(f));
  for (std::size_t j = 0; j < f; ++j) {
    model.scaler.mean[j] = parse_double(mean[j]);
    model.scaler.scale[j] = parse_double(scale[j]);
    model.scaler.degenerate[j] = degenerate[j] == "1";
    model.w[j] = parse_double(w[j]);
  }
  model.b = parse_double(expect_line(in, "bias", 1)[0]);
  if (!model.w.allFinite() || !std::isfinite(model.b)) {
    throw Error(Errc::NonFiniteFeature, "model weights must be finite");
  }
  return model;
}

}  // namespace forestmap
