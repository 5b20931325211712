#pragma once

#include <functional>
#include <string_view>

namespace xvh {

using WarningSink = std::function<void(std::string_view)>;

// Default sink writes "warning: <msg>" to std::clog. Returns the old sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace xvh
