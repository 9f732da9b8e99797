#pragma once

#include <stdexcept>
#include <string>

namespace vne {

enum class Errc {
  empty_dimension,
  dimension_mismatch,
  invalid_argument,
  domain,
  parse,
  io,
  not_symmetric,
  not_psd,
  negative_probability,
  rank_deficient,
  no_convergence,
  oracle_limit,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::empty_dimension: return "empty_dimension";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::domain: return "domain";
    case Errc::parse: return "parse";
    case Errc::io: return "io";
    case Errc::not_symmetric: return "not_symmetric";
    case Errc::not_psd: return "not_psd";
    case Errc::negative_probability: return "negative_probability";
    case Errc::rank_deficient: return "rank_deficient";
    case Errc::no_convergence: return "no_convergence";
    case Errc::oracle_limit: return "oracle_limit";
  }
  return "unknown";
}

/// Numerical failures are the ones a caller cannot fix by changing flags.
inline bool is_numerical(Errc code) {
  return code == Errc::not_psd || code == Errc::negative_probability ||
         code == Errc::rank_deficient || code == Errc::no_convergence;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace vne
