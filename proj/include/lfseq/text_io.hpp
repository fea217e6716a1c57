// lfseq/text_io.hpp
// Line-oriented text readers/writers shared by the graph, LM, matrix and
// model file formats.

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

#ifndef LFSEQ_TEXT_IO_HPP
#define LFSEQ_TEXT_IO_HPP

#include "lfseq/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lfseq {

// Tokenizing reader that tracks line numbers for error messages.
class LineReader {
 public:
  LineReader(std::istream &is, std::string source_name);

  // Reads the next non-empty line and splits it on whitespace.
  // Returns false at end of input.
  bool Next(std::vector<std::string> *tokens);

  int LineNumber() const { return line_number_; }
  const std::string &SourceName() const { return source_name_; }

  template <typename... Args>
  [[noreturn]] void FailHere(const Args &...args) const {
    Fail(source_name_, ":", line_number_, ": ", args...);
  }

  int ParseInt(const std::string &tok) const;
  double ParseDouble(const std::string &tok) const;

 private:
  std::istream &is_;
  std::string source_name_;
  int line_number_ = 0;
};

// `MAT <rows> <cols>` header followed by one row per line.
void WriteMatrix(std::ostream &os, const Matrix &mat);
Matrix ReadMatrix(LineReader *reader);

void WriteMatrixFile(const std::string &path, const Matrix &mat);
Matrix ReadMatrixFile(const std::string &path);

std::ofstream OpenOutput(const std::string &path);
std::ifstream OpenInput(const std::string &path);

// Fixed-format double used by every text format (17 significant digits).
std::string FormatDouble(double value);

}  // namespace lfseq

#endif  // LFSEQ_TEXT_IO_HPP
