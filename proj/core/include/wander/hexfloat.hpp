#pragma once

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wander {

// Bit-exact text for doubles: "0x1.8p+1" style.
std::string hex_double(double x);
double parse_hex_double(const std::string& s);

nlohmann::json hex_pair(std::complex<double> z);
std::complex<double> parse_hex_pair(const nlohmann::json& j);

nlohmann::json hex_array(const std::vector<std::complex<double>>& zs);
std::vector<std::complex<double>> parse_hex_array(const nlohmann::json& j);

}  // namespace wander
