#ifndef APTC_PRINTER_HPP
#define APTC_PRINTER_HPP

#include <string>

#include "aptc/model.hpp"
#include "aptc/term.hpp"

namespace aptc {

// Fully parenthesized canonical text; parse(render(t)) is identity.
std::string render_term(const TermPtr& t);

// Renders the expanded model (ground equations, ground gamma table).
std::string render_model(const Model& m);

}  // namespace aptc

#endif
