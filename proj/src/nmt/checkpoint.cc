#include "subchar/nmt/checkpoint.h"

#include <cstdlib>
#include <fstream>
#include <ios>
#include <istream>
#include <ostream>
#include <sstream>

#include "subchar/text.h"

namespace subchar::nmt {

namespace {

constexpr const char* kMagic = "subchar-nmt-checkpoint";
constexpr int kVersion = 1;

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::vector<std::string> fields(const std::string& key, std::size_t count) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file, expected '" + key + "'");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto parts = split_whitespace(line);
    if (parts.empty() || parts[0] != key) fail("expected '" + key + "'");
    if (parts.size() != count + 1) fail("'" + key + "' takes " + std::to_string(count) + " fields");
    parts.erase(parts.begin());
    return parts;
  }

  std::string raw() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("checkpoint line " + std::to_string(line_no_) + ": " + msg);
  }

  long long integer(const std::string& s) const {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') fail("bad integer '" + s + "'");
    return v;
  }

  double real(const std::string& s) const {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') fail("bad number '" + s + "'");
    return v;
  }

  uint64_t hex(const std::string& s) const {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 16);
    if (s.empty() || *end != '\0') fail("bad hash '" + s + "'");
    return v;
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

void write_vocab(std::ostream& out, const char* side, const Vocab& v) {
  out << "vocab " << side << ' ' << v.size() << ' ' << hex64(v.hash()) << '\n';
  for (const auto& s : v.symbols()) out << s << '\n';
}

Vocab read_vocab(Reader& r, const char* side) {
  const auto f = r.fields(std::string("vocab"), 3);
  if (f[0] != side) r.fail(std::string("expected ") + side + " vocabulary");
  const long long n = r.integer(f[1]);
  if (n < Vocab::kReserved) r.fail("vocabulary too small");
  std::vector<std::string> symbols;
  for (long long i = 0; i < n; ++i) symbols.push_back(r.raw());
  Vocab v = Vocab::from_symbols(symbols);
  if (v.hash() != r.hex(f[2])) r.fail(std::string(side) + " vocabulary hash mismatch");
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const Seq2SeqModel& m = ckpt.model;
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims " << m.dims.embedding << ' ' << m.dims.hidden << ' ' << m.dims.layers << ' '
      << m.dims.attention << ' ' << (m.dims.normalize_attention ? 1 : 0) << ' ' << std::hexfloat
      << m.dims.forget_bias << std::defaultfloat << '\n';
  out << "shared " << (m.shared_embeddings ? 1 : 0) << '\n';
  out << "step " << ckpt.step << '\n';
  write_vocab(out, "src", ckpt.src_vocab);
  write_vocab(out, "tgt", ckpt.tgt_vocab);
  std::size_t count = 0;
  m.visit([&](const std::string&, const Mat&) { ++count; });
  out << "tensors " << count << '\n';
  out << std::hexfloat;
  m.visit([&](const std::string& name, const Mat& t) {
    out << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) out << (c ? " " : "") << t(r, c);
      out << '\n';
    }
  });
  out << std::defaultfloat << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  const auto head = r.fields(kMagic, 1);
  if (r.integer(head[0]) != kVersion) r.fail("unsupported version " + head[0]);
  const auto d = r.fields("dims", 6);
  Dims dims;
  dims.embedding = static_cast<int>(r.integer(d[0]));
  dims.hidden = static_cast<int>(r.integer(d[1]));
  dims.layers = static_cast<int>(r.integer(d[2]));
  dims.attention = static_cast<int>(r.integer(d[3]));
  dims.normalize_attention = r.integer(d[4]) != 0;
  dims.forget_bias = r.real(d[5]);
  const bool shared = r.integer(r.fields("shared", 1)[0]) != 0;
  Checkpoint ckpt;
  ckpt.step = r.integer(r.fields("step", 1)[0]);
  ckpt.src_vocab = read_vocab(r, "src");
  ckpt.tgt_vocab = read_vocab(r, "tgt");
  if (shared && !(ckpt.src_vocab == ckpt.tgt_vocab)) r.fail("shared model with two vocabularies");

  ckpt.model = init_model(dims, static_cast<int>(ckpt.src_vocab.size()),
                          static_cast<int>(ckpt.tgt_vocab.size()), shared, 0);
  std::vector<std::pair<std::string, Mat*>> slots;
  ckpt.model.visit([&](const std::string& name, Mat& t) { slots.push_back({name, &t}); });
  const long long n = r.integer(r.fields("tensors", 1)[0]);
  if (n != static_cast<long long>(slots.size())) r.fail("tensor count does not match dims");
  for (auto& [name, t] : slots) {
    const auto f = r.fields("tensor", 3);
    if (f[0] != name) r.fail("expected tensor " + name + ", found " + f[0]);
    if (r.integer(f[1]) != t->rows() || r.integer(f[2]) != t->cols()) {
      r.fail("tensor " + name + " shape does not match dims");
    }
    for (Eigen::Index row = 0; row < t->rows(); ++row) {
      const auto vals = split_whitespace(r.raw());
      if (static_cast<Eigen::Index>(vals.size()) != t->cols()) r.fail("row width mismatch in " + name);
      for (Eigen::Index c = 0; c < t->cols(); ++c) (*t)(row, c) = r.real(vals[static_cast<std::size_t>(c)]);
    }
  }
  r.fields("end", 0);
  check_shapes(ckpt.model);
  if (!ckpt.model.all_finite()) throw Error("checkpoint holds non-finite parameters");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ostringstream os;
  write_checkpoint(os, ckpt);
  write_file(path, os.str());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  try {
    return read_checkpoint(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace subchar::nmt
