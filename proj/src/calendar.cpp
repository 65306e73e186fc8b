#include "sparsecast/calendar.hpp"

#include <cstdio>

namespace sparsecast {

std::string Month::str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
    return buf;
}

Month Month::parse(const std::string& s) {
    int y = 0, m = 0;
    if (std::sscanf(s.c_str(), "%d-%d", &y, &m) != 2 || m < 1 || m > 12)
        throw std::invalid_argument("bad month string: " + s);
    return Month(y, m);
}

std::string Quarter::str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-Q%d", year(), quarter());
    return buf;
}

Quarter Quarter::parse(const std::string& s) {
    int y = 0, q = 0;
    if (std::sscanf(s.c_str(), "%d-Q%d", &y, &q) != 2 || q < 1 || q > 4)
        throw std::invalid_argument("bad quarter string: " + s);
    return Quarter(y, q);
}

}  // namespace sparsecast
