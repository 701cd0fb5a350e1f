#include "keyagree/attack.hpp"

#include <set>

namespace keyagree {

LinkTuple apply_replacements(const LinkTuple& sent, std::span<const LinkReplacement> replacements) {
    std::set<int> seen;
    LinkTuple out = sent;
    for (const auto& rep : replacements) {
        if (rep.link < 0 || rep.link >= sent.n()) throw ParameterError("replacement link index out of range");
        if (!seen.insert(rep.link).second) throw ParameterError("duplicate replacement on one link");
        out = out.with_message(rep.link, rep.value);
    }
    return out;
}

}  // namespace keyagree
