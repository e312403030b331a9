#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace clusterlab {

// Minimal CSV emitter. Fields may not contain commas, quotes, or newlines;
// reals are printed with %.17g so identical runs produce identical bytes.
class CsvFile {
public:
    explicit CsvFile(const std::string& path);

    void row(const std::vector<std::string>& fields);

    static std::string fmt(double v);
    static std::string fmt(long long v);
    static std::string fmt(int v) { return fmt(static_cast<long long>(v)); }

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace clusterlab
