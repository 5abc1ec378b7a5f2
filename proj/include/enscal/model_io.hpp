#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "enscal/bma.hpp"
#include "enscal/emos.hpp"

namespace enscal {

using AnyModel =
    std::variant<BmaNormalModel, BmaGammaModel, BmaTruncNormalModel, EmosModel>;

// Versioned plain-text key-value form; numbers use shortest round-trip
// formatting so serialize -> parse is exact.
std::string serialize_model(const AnyModel& model);
AnyModel parse_model(std::string_view text);

}  // namespace enscal
