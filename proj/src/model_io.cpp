#include "nc/model_io.hpp"

#include "nc/dataset.hpp"
#include "nc/errors.hpp"

#include <fstream>
#include <sstream>

namespace nc {

namespace {

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << "\n";
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      out += s[i + 1] == 'n' ? '\n' : s[i + 1];
      ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

class Reader {
 public:
  Reader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of file");
    ++line_no_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  // Reads "<keyword> <ints...>".
  std::vector<long> tagged(const std::string& keyword, std::size_t count) {
    std::istringstream is(line());
    std::string word;
    is >> word;
    if (word != keyword) fail("expected '" + keyword + "', found '" + word + "'");
    std::vector<long> values(count);
    for (auto& v : values)
      if (!(is >> v)) fail("missing integer after '" + keyword + "'");
    return values;
  }

  Eigen::MatrixXd matrix(const std::string& keyword) {
    const auto dims = tagged(keyword, 2);
    if (dims[0] < 0 || dims[1] < 0 || dims[0] > 100000 || dims[1] > 100000) fail("bad matrix shape");
    Eigen::MatrixXd m(dims[0], dims[1]);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::istringstream is(line());
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::string tok;
        if (!(is >> tok)) fail("row too short in " + keyword);
        try {
          m(i, j) = parse_double(tok);
        } catch (const UsageError&) {
          fail("bad number '" + tok + "' in " + keyword);
        }
      }
    }
    return m;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelFormatError("model '" + path_ + "': " + what + " (line " + std::to_string(line_no_) + ")");
  }

 private:
  std::istream& in_;
  std::string path_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_model(const IcnnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << kModelMagic << " " << kModelFormatVersion << "\n";
  out << "input_dimension " << model.input_dimension() << "\n";
  out << "block " << model.block_width() << " " << model.block_depth() << "\n";
  out << "layers " << model.layers().size() << "\n";
  for (std::size_t k = 0; k < model.layers().size(); ++k) {
    const auto& l = model.layers()[k];
    out << "layer " << k << " " << l.width() << " " << (l.linear ? 1 : 0) << "\n";
    write_matrix(out, "wz", l.wz);
    write_matrix(out, "wx", l.wx);
    write_matrix(out, "b", l.b);
  }
  out << "metadata " << model.metadata.size() << "\n";
  for (const auto& [k, v] : model.metadata) out << escape(k) << "=" << escape(v) << "\n";
  out << "end\n";
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

IcnnModel load_model(const std::filesystem::path& path, std::optional<int> expected_input_dimension) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  Reader r(in, path.string());
  {
    std::istringstream is(r.line());
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != kModelMagic) r.fail("not a model file (bad magic)");
    if (version != kModelFormatVersion) r.fail("unsupported format version " + std::to_string(version));
  }
  const int input_dim = static_cast<int>(r.tagged("input_dimension", 1)[0]);
  const auto block = r.tagged("block", 2);
  const auto n_layers = r.tagged("layers", 1)[0];
  if (n_layers < 1 || n_layers > 10000) r.fail("bad layer count");
  std::vector<IcnnLayer> layers;
  for (long k = 0; k < n_layers; ++k) {
    const auto head = r.tagged("layer", 3);
    if (head[0] != k) r.fail("layers out of order");
    IcnnLayer l;
    l.wz = r.matrix("wz");
    l.wx = r.matrix("wx");
    const Eigen::MatrixXd b = r.matrix("b");
    if (b.cols() != 1 || b.rows() != head[1]) r.fail("bias shape does not match layer width");
    l.b = b.col(0);
    l.linear = head[2] != 0;
    layers.push_back(std::move(l));
  }
  const auto n_meta = r.tagged("metadata", 1)[0];
  std::map<std::string, std::string> metadata;
  for (long k = 0; k < n_meta; ++k) {
    const std::string s = r.line();
    const auto eq = s.find('=');
    if (eq == std::string::npos) r.fail("bad metadata entry");
    metadata[unescape(s.substr(0, eq))] = unescape(s.substr(eq + 1));
  }
  if (r.line() != "end") r.fail("missing end marker");

  IcnnModel model;
  try {
    if (block[0] > 0 && block[1] > 0) {
      model = IcnnModel::build(input_dim, static_cast<int>(block[0]), static_cast<int>(block[1]));
      if (model.layers().size() != layers.size()) r.fail("layer count does not match block layout");
      model.mutable_layers() = std::move(layers);
    } else {
      model = IcnnModel(input_dim, std::move(layers));
    }
  } catch (const UsageError& e) {
    r.fail(e.what());
  }
  // Re-check shapes after the layers were swapped in.
  try {
    IcnnModel check(input_dim, model.layers());
  } catch (const UsageError& e) {
    r.fail(e.what());
  }
  model.metadata = std::move(metadata);
  if (expected_input_dimension && *expected_input_dimension != input_dim) {
    throw HeaderMismatchError("model '" + path.string() + "' has input dimension " + std::to_string(input_dim) +
                              ", expected " + std::to_string(*expected_input_dimension));
  }
  return model;
}

}  // namespace nc
