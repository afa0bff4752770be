#ifndef SCRI_SCATTER_VERSION_HPP
#define SCRI_SCATTER_VERSION_HPP

namespace scri {
inline constexpr const char *version_string = "0.1.0";
}

#endif
