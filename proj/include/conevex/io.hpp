#pragma once

#include "conevex/body.hpp"
#include "conevex/cone.hpp"
#include "conevex/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conevex {


struct Instance {
  ConeModel cone;
  std::vector<GroupElement> generators;
  int word_bound = 0;
  std::optional<Vec> coboundary;
  nlohmann::json raw;

  GroupAction action() const;
  std::string hash() const;  // FNV-1a of the canonical JSON
};

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const ConeModel& cone, const std::vector<GroupElement>& gens, int word_bound,
                                const std::optional<Vec>& coboundary);
Instance load_instance(const std::string& path);

std::string fnv1a_hex(const std::string& s);
std::string fmt17(double x);

// First line of every output file.
nlohmann::json output_header(const Instance& inst, std::uint64_t seed, const nlohmann::json& grid);
std::string header_line(const nlohmann::json& header);
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Grid CSV: header line, "box,..." row with lo/hi and shape, then index,y...,value,mask.
std::string grid_csv(const GridFn& f, const nlohmann::json& header);
GridFn parse_grid_csv(const std::string& text);

// Torus CSV: index,theta...,y...,h.
struct TorusRow {
  std::vector<double> theta;
  std::vector<double> y;
  double h = 0.0;
};
std::string torus_csv(const std::vector<TorusRow>& rows, int n, const nlohmann::json& header);
std::vector<double> parse_torus_csv(const std::string& text, int* n_out = nullptr);

// Measure CSV: cell index, density, atom flag, mass.
std::string measure_csv(const std::vector<double>& mass, const std::vector<double>& density,
                        const std::vector<std::uint8_t>& atom, const nlohmann::json& header);
std::vector<double> parse_measure_csv(const std::string& text);

// Splits "a,b,c" into doubles.
std::vector<double> parse_list(const std::string& s);

}  // namespace conevex
