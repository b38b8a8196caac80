#include "dive/error.hpp"

namespace dive {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(ErrorKind::kParse, source + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace dive
