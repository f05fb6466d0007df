#pragma once

#include <stdexcept>
#include <string>

namespace patheval {

// Every recoverable failure in the library surfaces as an Error. The CLI maps
// it to a non-zero exit code; batch drivers catch it per utterance and record
// the message in skipped.csv.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Raised when an utterance carries no detectable speech. Callers usually skip
// the utterance rather than abort the run.
class NoSpeechError : public Error
{
public:
  using Error::Error;
};

}  // namespace patheval
