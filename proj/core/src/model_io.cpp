// Copyright 2026 The SupraHMM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "suprahmm/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "suprahmm/error.hpp"
#include "suprahmm/rng.hpp"

namespace suprahmm {

namespace {

std::string fp(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

void write_values(std::ostream &out, const std::vector<double> &values) {
  for (double v : values) out << " " << fp(v);
  out << "\n";
}

// Token-stream reader with keyword checking for the model documents.
class Reader {
 public:
  Reader(std::istream &in, std::string context)
      : in_(in), context_(std::move(context)) {}

  std::string next() {
    std::string token;
    if (!(in_ >> token)) {
      throw FormatError(context_ + ": unexpected end of document");
    }
    return token;
  }

  void expect(const std::string &keyword) {
    std::string token = next();
    if (token != keyword) {
      throw FormatError(context_ + ": expected '" + keyword + "', found '" +
                        token + "'");
    }
  }

  int next_int() {
    std::string token = next();
    try {
      return std::stoi(token);
    } catch (const std::exception &) {
      throw FormatError(context_ + ": expected integer, found '" + token +
                        "'");
    }
  }

  double next_double() {
    std::string token = next();
    try {
      std::size_t used = 0;
      double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return value;
    } catch (const std::exception &) {
      throw FormatError(context_ + ": expected number, found '" + token +
                        "'");
    }
  }

  std::vector<double> next_doubles(std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(next_double());
    return out;
  }

  bool peek(const std::string &keyword) {
    std::string token;
    auto pos = in_.tellg();
    if (!(in_ >> token)) return false;
    in_.seekg(pos);
    return token == keyword;
  }

 private:
  std::istream &in_;
  std::string context_;
};

void write_hmm(std::ostream &out, const std::string &name,
               const Hmm2Model &model) {
  const int N = model.n_states();
  const int M = model.emissions.front().mixtures();
  out << "hmm " << name << "\n";
  out << "order " << model.topology.order << "\n";
  out << "shape " << shape_name(model.topology.shape) << "\n";
  out << "states " << N << "\n";
  out << "dim " << model.dim() << "\n";
  out << "mixtures " << M << "\n";
  out << "initial";
  write_values(out, model.initial);
  out << "matrix";
  write_values(out, model.transitions.matrix);
  if (model.topology.order == 2) {
    out << "tensor";
    write_values(out, model.transitions.tensor);
  }
  for (int s = 0; s < N; ++s) {
    const GmmEmission &gmm = model.emissions[s];
    out << "state " << s << " weights";
    write_values(out, gmm.weights);
    for (int m = 0; m < M; ++m) {
      out << "state " << s << " mean " << m;
      for (double v : gmm.mean(m)) out << " " << fp(v);
      out << "\n";
      out << "state " << s << " var " << m;
      for (double v : gmm.variance(m)) out << " " << fp(v);
      out << "\n";
    }
  }
  out << "trained " << model.training.iterations << " "
      << fp(model.training.final_log_likelihood) << " "
      << (model.training.covariance_floored ? 1 : 0) << "\n";
  out << "history " << model.training.history.size();
  for (double v : model.training.history) out << " " << fp(v);
  out << "\n";
  out << "end hmm\n";
}

Hmm2Model read_hmm(Reader &reader, const std::string &name) {
  reader.expect("hmm");
  reader.expect(name);
  Hmm2Model model;
  reader.expect("order");
  model.topology.order = reader.next_int();
  reader.expect("shape");
  model.topology.shape = shape_from_name(reader.next());
  reader.expect("states");
  model.topology.n_states = reader.next_int();
  const int N = model.topology.n_states;
  if (N < 1) throw FormatError("model document: states < 1");
  reader.expect("dim");
  const int dim = reader.next_int();
  reader.expect("mixtures");
  const int M = reader.next_int();
  if (dim < 1 || M < 1) throw FormatError("model document: bad dim/mixtures");
  reader.expect("initial");
  model.initial = reader.next_doubles(N);
  reader.expect("matrix");
  model.transitions.matrix =
      reader.next_doubles(static_cast<std::size_t>(N) * N);
  if (model.topology.order == 2) {
    reader.expect("tensor");
    model.transitions.tensor =
        reader.next_doubles(static_cast<std::size_t>(N) * N * N);
  }
  model.emissions.resize(N);
  for (int s = 0; s < N; ++s) {
    GmmEmission &gmm = model.emissions[s];
    gmm.dim = dim;
    reader.expect("state");
    if (reader.next_int() != s) {
      throw FormatError("model document: states out of order");
    }
    reader.expect("weights");
    gmm.weights = reader.next_doubles(M);
    gmm.means.resize(static_cast<std::size_t>(M) * dim);
    gmm.variances.resize(static_cast<std::size_t>(M) * dim);
    for (int m = 0; m < M; ++m) {
      reader.expect("state");
      if (reader.next_int() != s) {
        throw FormatError("model document: mean block out of order");
      }
      reader.expect("mean");
      if (reader.next_int() != m) {
        throw FormatError("model document: mean component out of order");
      }
      std::vector<double> mean = reader.next_doubles(dim);
      reader.expect("state");
      if (reader.next_int() != s) {
        throw FormatError("model document: var block out of order");
      }
      reader.expect("var");
      if (reader.next_int() != m) {
        throw FormatError("model document: var component out of order");
      }
      std::vector<double> var = reader.next_doubles(dim);
      for (int d = 0; d < dim; ++d) {
        gmm.means[static_cast<std::size_t>(m) * dim + d] = mean[d];
        gmm.variances[static_cast<std::size_t>(m) * dim + d] = var[d];
      }
    }
  }
  reader.expect("trained");
  model.training.iterations = reader.next_int();
  model.training.final_log_likelihood = reader.next_double();
  model.training.covariance_floored = reader.next_int() != 0;
  reader.expect("history");
  const int entries = reader.next_int();
  if (entries < 0) throw FormatError("model document: negative history size");
  model.training.history = reader.next_doubles(entries);
  reader.expect("end");
  reader.expect("hmm");
  model.validate();
  return model;
}

}  // namespace

void save_condition_model(const std::filesystem::path &path,
                          const ConditionModel &model) {
  model.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write model document: " + path.string());
  out << "suprahmm-model v1\n";
  out << "condition " << model.label << "\n";
  write_hmm(out, "acoustic", model.acoustic);
  if (model.suprasegmental) {
    const StateMapping &mapping = model.suprasegmental->mapping;
    out << "mapping " << mapping.n_acoustic << " " << mapping.n_supra;
    for (int s : mapping.assignment) out << " " << s;
    out << "\n";
    write_hmm(out, "prosodic", model.suprasegmental->prosodic);
  }
  out << "end model\n";
  if (!out) throw IoError("short write to model document: " + path.string());
}

ConditionModel load_condition_model(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model document: " + path.string());
  Reader reader(in, path.string());
  reader.expect("suprahmm-model");
  reader.expect("v1");
  reader.expect("condition");
  ConditionModel model;
  model.label = reader.next();
  model.acoustic = read_hmm(reader, "acoustic");
  if (reader.peek("mapping")) {
    reader.expect("mapping");
    SuprasegmentalModel supra;
    supra.mapping.n_acoustic = reader.next_int();
    supra.mapping.n_supra = reader.next_int();
    supra.mapping.assignment.resize(supra.mapping.n_acoustic);
    for (int &s : supra.mapping.assignment) s = reader.next_int();
    supra.prosodic = read_hmm(reader, "prosodic");
    model.suprasegmental = std::move(supra);
  }
  reader.expect("end");
  reader.expect("model");
  model.validate();
  return model;
}

void save_codebook(const std::filesystem::path &path, const Codebook &book) {
  book.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write codebook: " + path.string());
  out << "suprahmm-model v1\n";
  out << "codebook " << book.label << "\n";
  out << "dim " << book.dim << "\n";
  out << "k " << book.k() << "\n";
  for (int c = 0; c < book.k(); ++c) {
    out << "centroid " << c;
    for (double v : book.centroid(c)) out << " " << fp(v);
    out << "\n";
  }
  out << "history " << book.distortion_history.size();
  for (double v : book.distortion_history) out << " " << fp(v);
  out << "\n";
  out << "end model\n";
  if (!out) throw IoError("short write to codebook: " + path.string());
}

Codebook load_codebook(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open codebook: " + path.string());
  Reader reader(in, path.string());
  reader.expect("suprahmm-model");
  reader.expect("v1");
  reader.expect("codebook");
  Codebook book;
  book.label = reader.next();
  reader.expect("dim");
  book.dim = reader.next_int();
  reader.expect("k");
  const int k = reader.next_int();
  if (book.dim < 1 || k < 1) throw FormatError("codebook: bad shape");
  book.centroids.resize(static_cast<std::size_t>(k) * book.dim);
  for (int c = 0; c < k; ++c) {
    reader.expect("centroid");
    if (reader.next_int() != c) {
      throw FormatError("codebook: centroids out of order");
    }
    std::vector<double> values = reader.next_doubles(book.dim);
    for (int d = 0; d < book.dim; ++d) {
      book.centroids[static_cast<std::size_t>(c) * book.dim + d] = values[d];
    }
  }
  reader.expect("history");
  const int entries = reader.next_int();
  if (entries < 0) throw FormatError("codebook: negative history size");
  book.distortion_history = reader.next_doubles(entries);
  reader.expect("end");
  reader.expect("model");
  book.validate();
  return book;
}

std::uint64_t feature_config_hash(const MfccConfig &mfcc,
                                  const ProsodyConfig &prosody,
                                  int sample_rate) {
  return fnv1a64(mfcc.describe(sample_rate) + "|" +
                 prosody.describe(sample_rate));
}

void save_bank(const std::filesystem::path &dir, const ConditionBank &bank) {
  bank.validate();
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "bank.manifest", std::ios::trunc);
  if (!out) throw IoError("cannot write bank manifest in " + dir.string());
  out << "suprahmm-bank v1\n";
  out << "alpha " << fp(bank.alpha) << "\n";
  out << "sample_rate " << bank.sample_rate << "\n";
  out << "normalize " << (bank.normalize_scores ? 1 : 0) << "\n";
  const FrameSpec &frame = bank.mfcc.frame;
  out << "frame_ms " << fp(frame.frame_len_ms) << "\n";
  out << "overlap_ms " << fp(frame.overlap_ms) << "\n";
  out << "preemphasis " << fp(frame.preemphasis) << "\n";
  out << "n_static " << bank.mfcc.n_static << "\n";
  out << "n_filters " << bank.mfcc.n_filters << "\n";
  out << "fft_size " << bank.mfcc.fft_size << "\n";
  out << "mel_low_hz " << fp(bank.mfcc.mel_low_hz) << "\n";
  out << "mel_high_hz " << fp(bank.mfcc.mel_high_hz) << "\n";
  out << "log_floor " << fp(bank.mfcc.log_floor) << "\n";
  out << "delta_window " << bank.mfcc.delta_window << "\n";
  out << "energy_frame_ms " << fp(bank.prosody.energy_frame_ms) << "\n";
  out << "pitch_frame_ms " << fp(bank.prosody.pitch_frame_ms) << "\n";
  out << "energy_floor " << fp(bank.prosody.energy_floor) << "\n";
  out << "voicing_threshold " << fp(bank.prosody.voicing_threshold) << "\n";
  out << "pitch_min_hz " << fp(bank.prosody.pitch_min_hz) << "\n";
  out << "pitch_max_hz " << fp(bank.prosody.pitch_max_hz) << "\n";
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(feature_config_hash(
                    bank.mfcc, bank.prosody, bank.sample_rate)));
  out << "feature_hash " << hash << "\n";
  for (const ConditionModel &cond : bank.conditions) {
    const std::string file = cond.label + ".model";
    out << "condition " << cond.label << " " << file << "\n";
    save_condition_model(dir / file, cond);
  }
  if (!out) throw IoError("short write to bank manifest in " + dir.string());
}

ConditionBank load_bank(const std::filesystem::path &dir) {
  std::ifstream in(dir / "bank.manifest");
  if (!in) throw IoError("cannot open bank manifest in " + dir.string());
  std::string line;
  if (!std::getline(in, line) || line != "suprahmm-bank v1") {
    throw FormatError("bad bank manifest header in " + dir.string());
  }
  ConditionBank bank;
  std::string stored_hash;
  std::vector<std::pair<std::string, std::string>> files;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "alpha") ls >> bank.alpha;
    else if (key == "sample_rate") ls >> bank.sample_rate;
    else if (key == "normalize") {
      int flag = 0;
      ls >> flag;
      bank.normalize_scores = flag != 0;
    } else if (key == "frame_ms") ls >> bank.mfcc.frame.frame_len_ms;
    else if (key == "overlap_ms") ls >> bank.mfcc.frame.overlap_ms;
    else if (key == "preemphasis") ls >> bank.mfcc.frame.preemphasis;
    else if (key == "n_static") ls >> bank.mfcc.n_static;
    else if (key == "n_filters") ls >> bank.mfcc.n_filters;
    else if (key == "fft_size") ls >> bank.mfcc.fft_size;
    else if (key == "mel_low_hz") ls >> bank.mfcc.mel_low_hz;
    else if (key == "mel_high_hz") ls >> bank.mfcc.mel_high_hz;
    else if (key == "log_floor") ls >> bank.mfcc.log_floor;
    else if (key == "delta_window") ls >> bank.mfcc.delta_window;
    else if (key == "energy_frame_ms") ls >> bank.prosody.energy_frame_ms;
    else if (key == "pitch_frame_ms") ls >> bank.prosody.pitch_frame_ms;
    else if (key == "energy_floor") ls >> bank.prosody.energy_floor;
    else if (key == "voicing_threshold") ls >> bank.prosody.voicing_threshold;
    else if (key == "pitch_min_hz") ls >> bank.prosody.pitch_min_hz;
    else if (key == "pitch_max_hz") ls >> bank.prosody.pitch_max_hz;
    else if (key == "feature_hash") ls >> stored_hash;
    else if (key == "condition") {
      std::string label, file;
      ls >> label >> file;
      files.emplace_back(label, file);
    } else {
      throw FormatError("unknown bank manifest key: " + key);
    }
    if (ls.fail()) throw FormatError("bad bank manifest line: " + line);
  }
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(feature_config_hash(
                    bank.mfcc, bank.prosody, bank.sample_rate)));
  if (stored_hash != hash) {
    throw FormatError(
        "bank manifest feature_hash does not match its feature fields in " +
        dir.string());
  }
  for (const auto &[label, file] : files) {
    ConditionModel model = load_condition_model(dir / file);
    if (model.label != label) {
      throw FormatError("bank lists " + label + " but " + file + " holds " +
                        model.label);
    }
    bank.conditions.push_back(std::move(model));
  }
  bank.validate();
  return bank;
}

}  // namespace suprahmm
