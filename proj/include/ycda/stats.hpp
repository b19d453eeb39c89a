#ifndef YCDA_STATS_HPP
#define YCDA_STATS_HPP

#include <string>
#include <vector>

#include "ycda/colorspace.hpp"

namespace ycda {

/// One row of the per-image YCbCr statistics table.
struct StatsRow {
    std::string id;
    std::string label;  // empty when unknown
    double y_mean = 0, cb_mean = 0, cr_mean = 0;
    double y_var = 0, cb_var = 0, cr_var = 0;
};

/// Mean and population variance of the raw Y, Cb, Cr channels.
StatsRow image_stats(const std::string& id, const std::string& label,
                     const ImageRGB& img);

/// CSV with fixed column order id,label,Y_mean,Cb_mean,Cr_mean,Y_var,Cb_var,
/// Cr_var, locale-independent formatting, followed by '#'-prefixed summary
/// lines with mean statistics per labeled group.
std::string stats_csv(const std::vector<StatsRow>& rows);

/// Shortest round-trippable decimal representation, '.' separator.
std::string format_double(double v);

}  // namespace ycda

#endif  // YCDA_STATS_HPP
