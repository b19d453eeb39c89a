#include "ycda/stats.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "ycda/tensor.hpp"

namespace ycda {

StatsRow image_stats(const std::string& id, const std::string& label,
                     const ImageRGB& img) {
    ImageYCbCr ycbcr = rgb_to_ycbcr(img);
    Tensor mean = reduce_spatial(ycbcr.pixels, SpatialStat::mean);
    Tensor var = reduce_spatial(ycbcr.pixels, SpatialStat::var);
    return {id, label, mean[0], mean[1], mean[2], var[0], var[1], var[2]};
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string stats_csv(const std::vector<StatsRow>& rows) {
    std::ostringstream os;
    os << "id,label,Y_mean,Cb_mean,Cr_mean,Y_var,Cb_var,Cr_var\n";
    for (const auto& r : rows)
        os << r.id << ',' << r.label << ',' << format_double(r.y_mean) << ','
           << format_double(r.cb_mean) << ',' << format_double(r.cr_mean) << ','
           << format_double(r.y_var) << ',' << format_double(r.cb_var) << ','
           << format_double(r.cr_var) << '\n';

    // per-group means, ordered by first appearance
    std::vector<std::string> order;
    std::map<std::string, std::pair<StatsRow, std::size_t>> groups;
    for (const auto& r : rows) {
        if (r.label.empty()) continue;
        auto [it, fresh] = groups.try_emplace(r.label, StatsRow{}, 0);
        if (fresh) order.push_back(r.label);
        auto& [acc, n] = it->second;
        acc.y_mean += r.y_mean;
        acc.cb_mean += r.cb_mean;
        acc.cr_mean += r.cr_mean;
        acc.y_var += r.y_var;
        acc.cb_var += r.cb_var;
        acc.cr_var += r.cr_var;
        ++n;
    }
    for (const auto& label : order) {
        auto& [acc, n] = groups.at(label);
        const double d = static_cast<double>(n);
        os << "# group " << label << " n=" << n
           << " Y_mean=" << format_double(acc.y_mean / d)
           << " Cb_mean=" << format_double(acc.cb_mean / d)
           << " Cr_mean=" << format_double(acc.cr_mean / d)
           << " Y_var=" << format_double(acc.y_var / d)
           << " Cb_var=" << format_double(acc.cb_var / d)
           << " Cr_var=" << format_double(acc.cr_var / d) << '\n';
    }
    return os.str();
}

}  // namespace ycda
