#pragma once

#include <string>

namespace manet {

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace manet
