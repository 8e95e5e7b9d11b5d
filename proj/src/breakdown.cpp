#include "fq/breakdown.hpp"

namespace fq {

const char* term_name(Term t) {
  switch (t) {
    case Term::UP: return "up";
    case Term::VQ: return "vq";
    case Term::HL: return "hl";
    case Term::HR: return "hr";
    case Term::HM: return "hm";
    case Term::BWD: return "bwd";
  }
  return "?";
}

}  // namespace fq
