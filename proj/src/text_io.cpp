// text_io.cpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lfseq/text_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lfseq {

LineReader::LineReader(std::istream &is, std::string source_name)
    : is_(is), source_name_(std::move(source_name)) {}

bool LineReader::Next(std::vector<std::string> *tokens) {
  std::string line;
  while (std::getline(is_, line)) {
    line_number_++;
    tokens->clear();
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens->push_back(tok);
    if (!tokens->empty()) return true;
  }
  return false;
}

int LineReader::ParseInt(const std::string &tok) const {
  try {
    size_t pos = 0;
    int value = std::stoi(tok, &pos);
    if (pos != tok.size()) FailHere("malformed integer '", tok, "'");
    return value;
  } catch (const Error &) {
    throw;
  } catch (const std::exception &) {
    FailHere("malformed integer '", tok, "'");
  }
}

double LineReader::ParseDouble(const std::string &tok) const {
  try {
    size_t pos = 0;
    double value = std::stod(tok, &pos);
    if (pos != tok.size()) FailHere("malformed number '", tok, "'");
    return value;
  } catch (const Error &) {
    throw;
  } catch (const std::exception &) {
    FailHere("malformed number '", tok, "'");
  }
}

std::string FormatDouble(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", kTextPrecision, value);
  return buf;
}

void WriteMatrix(std::ostream &os, const Matrix &mat) {
  os << "MAT " << mat.rows() << ' ' << mat.cols() << '\n';
  for (Eigen::Index r = 0; r < mat.rows(); r++) {
    for (Eigen::Index c = 0; c < mat.cols(); c++) {
      if (c > 0) os << ' ';
      os << FormatDouble(mat(r, c));
    }
    os << '\n';
  }
}

Matrix ReadMatrix(LineReader *reader) {
  std::vector<std::string> tokens;
  if (!reader->Next(&tokens)) reader->FailHere("expected MAT header, got end of input");
  if (tokens.size() != 3 || tokens[0] != "MAT")
    reader->FailHere("expected 'MAT <rows> <cols>' header");
  int rows = reader->ParseInt(tokens[1]);
  int cols = reader->ParseInt(tokens[2]);
  Require(rows >= 0 && cols >= 0, reader->SourceName(), ": negative matrix dims");
  Matrix mat(rows, cols);
  for (int r = 0; r < rows; r++) {
    if (!reader->Next(&tokens)) reader->FailHere("matrix truncated at row ", r);
    if (static_cast<int>(tokens.size()) != cols)
      reader->FailHere("expected ", cols, " values, got ", tokens.size());
    for (int c = 0; c < cols; c++) mat(r, c) = reader->ParseDouble(tokens[c]);
  }
  return mat;
}

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream os(path);
  Require(os.good(), "cannot open '", path, "' for writing");
  return os;
}

std::ifstream OpenInput(const std::string &path) {
  std::ifstream is(path);
  Require(is.good(), "cannot open '", path, "' for reading");
  return is;
}

void WriteMatrixFile(const std::string &path, const Matrix &mat) {
  auto os = OpenOutput(path);
  WriteMatrix(os, mat);
  Require(os.good(), "write failed for '", path, "'");
}

Matrix ReadMatrixFile(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  return ReadMatrix(&reader);
}

}  // namespace lfseq
