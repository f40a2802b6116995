// Copyright 2026 The Qrec Authors
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

#include "qrec/checkpoint.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qrec {

namespace {

constexpr const char* kMagic = "qrec-checkpoint 1";

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_real(const std::string& token) {
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw Error(ErrorCode::parse, "checkpoint: bad number '" + token + "'");
  }
  return v;
}

template <class Mat>
void write_rows(std::ostringstream& out, const char* name, const Mat& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << hexfloat(m(r, c));
    }
    out << '\n';
  }
}

Matrix read_rows(std::istringstream& in, const char* name) {
  std::string tag;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> tag >> rows >> cols) || tag != name || rows < 0 || cols < 0) {
    throw Error(ErrorCode::parse, std::string("checkpoint: expected block ") + name);
  }
  Matrix m(rows, cols);
  std::string token;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(in >> token)) throw Error(ErrorCode::parse, "checkpoint: truncated block");
      m(r, c) = parse_real(token);
    }
  }
  return m;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  const auto& m = ck.model;
  const auto& hp = ck.hp;
  std::ostringstream out;
  out << kMagic << '\n';
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016" PRIx64, ck.corpus_fingerprint);
  out << "corpus_fingerprint " << fp << '\n';
  out << "hp latent_dim " << hp.latent_dim << '\n'
      << "hp lambda_u " << hexfloat(hp.lambda_u) << '\n'
      << "hp lambda_v " << hexfloat(hp.lambda_v) << '\n'
      << "hp lambda_p " << hexfloat(hp.lambda_p) << '\n'
      << "hp lambda_q " << hexfloat(hp.lambda_q) << '\n'
      << "hp gamma " << hexfloat(hp.gamma) << '\n'
      << "hp max_iters " << hp.max_iters << '\n'
      << "hp adam_lr " << hexfloat(hp.adam_lr) << '\n'
      << "hp adam_beta1 " << hexfloat(hp.adam_beta1) << '\n'
      << "hp adam_beta2 " << hexfloat(hp.adam_beta2) << '\n'
      << "hp adam_eps " << hexfloat(hp.adam_eps) << '\n'
      << "hp init_stddev " << hexfloat(hp.init_stddev) << '\n'
      << "hp seed " << hp.seed << '\n'
      << "hp als_sweeps " << hp.als_sweeps << '\n';
  for (const auto& [key, value] : ck.meta) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw Error(ErrorCode::invalid_argument, "checkpoint meta keys must be single tokens");
    }
    out << "meta " << key << ' ' << value << '\n';
  }
  out << "model\n";
  write_rows(out, "U", m.U);
  write_rows(out, "V", m.V);
  write_rows(out, "p", Matrix(m.p.transpose()));
  write_rows(out, "q", Matrix(m.q.transpose()));
  out << "end\n";
  return out.str();
}

Checkpoint parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw Error(ErrorCode::parse, "not a qrec checkpoint (bad header)");
  }
  Checkpoint ck;
  auto& hp = ck.hp;
  while (std::getline(in, line)) {
    if (line == "model") break;
    std::istringstream ls(line);
    std::string kind, key, value;
    ls >> kind >> key;
    std::getline(ls >> std::ws, value);
    if (kind == "corpus_fingerprint") {
      ck.corpus_fingerprint = std::strtoull(key.c_str(), nullptr, 16);
    } else if (kind == "meta") {
      ck.meta[key] = value;
    } else if (kind == "hp") {
      if (key == "latent_dim") hp.latent_dim = std::stoi(value);
      else if (key == "lambda_u") hp.lambda_u = parse_real(value);
      else if (key == "lambda_v") hp.lambda_v = parse_real(value);
      else if (key == "lambda_p") hp.lambda_p = parse_real(value);
      else if (key == "lambda_q") hp.lambda_q = parse_real(value);
      else if (key == "gamma") hp.gamma = parse_real(value);
      else if (key == "max_iters") hp.max_iters = std::stoi(value);
      else if (key == "adam_lr") hp.adam_lr = parse_real(value);
      else if (key == "adam_beta1") hp.adam_beta1 = parse_real(value);
      else if (key == "adam_beta2") hp.adam_beta2 = parse_real(value);
      else if (key == "adam_eps") hp.adam_eps = parse_real(value);
      else if (key == "init_stddev") hp.init_stddev = parse_real(value);
      else if (key == "seed") hp.seed = std::stoull(value);
      else if (key == "als_sweeps") hp.als_sweeps = std::stoi(value);
      else throw Error(ErrorCode::parse, "checkpoint: unknown hyperparameter '" + key + "'");
    } else {
      throw Error(ErrorCode::parse, "checkpoint: unexpected line '" + line + "'");
    }
  }
  if (line != "model") throw Error(ErrorCode::parse, "checkpoint: missing model section");
  ck.model.U = read_rows(in, "U");
  ck.model.V = read_rows(in, "V");
  Matrix p = read_rows(in, "p");
  Matrix q = read_rows(in, "q");
  std::string end;
  if (!(in >> end) || end != "end") throw Error(ErrorCode::parse, "checkpoint: missing end marker");
  if (p.rows() != 1 || q.rows() != 1 || p.cols() != q.cols() || ck.model.U.cols() != p.cols() ||
      ck.model.V.cols() != p.cols()) {
    throw Error(ErrorCode::parse, "checkpoint: inconsistent latent dimensions");
  }
  ck.model.p = p.row(0).transpose();
  ck.model.q = q.row(0).transpose();
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& file) {
  auto text = serialize_checkpoint(checkpoint);
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot move checkpoint into place: " + file.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::not_found, "checkpoint not found: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_checkpoint(buf.str());
}

}  // namespace qrec
