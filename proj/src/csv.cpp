#include "clusterlab/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace clusterlab {

CsvFile::CsvFile(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path + " for writing");
}

void CsvFile::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        for (char c : fields[i]) {
            if (c == ',' || c == '"' || c == '\n' || c == '\r') {
                throw std::runtime_error("csv: field \"" + fields[i] +
                                         "\" needs quoting, which " + path_ +
                                         " does not support");
            }
        }
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("csv: write failed for " + path_);
}

std::string CsvFile::fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvFile::fmt(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", v);
    return buf;
}

}  // namespace clusterlab
