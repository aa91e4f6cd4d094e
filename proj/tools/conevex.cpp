#include "conevex/covolume.hpp"
#include "conevex/invariant.hpp"
#include "conevex/io.hpp"
#include "conevex/minkowski.hpp"
#include "conevex/sphere.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace conevex;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json grid_json(int n, int d) { return json{{"n", n}, {"d", d}}; }

// Writes the header line followed by a JSON payload.
void write_json(const std::string& path, const json& header, const json& payload) {
  write_text(path, header_line(header) + payload.dump(2) + "\n");
}

json read_payload(const std::string& path) {
  const std::string text = read_text(path);
  const auto nl = text.find('\n');
  if (nl == std::string::npos) throw ValidationError(path + ": missing payload after header line");
  try {
    return json::parse(text.substr(nl + 1));
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json vec_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

// Omega*-grid bodies: "cone", "sigma:T" or "offset:v0,..,vd:T".
Body body_from_spec(const std::string& spec, std::shared_ptr<const AffineSphere> sphere) {
  const int dim = sphere->cone.dim();
  if (spec == "cone") return offset_body(sphere, Vec::Zero(dim), 0.0);
  if (spec.rfind("sigma:", 0) == 0) return offset_body(sphere, Vec::Zero(dim), std::stod(spec.substr(6)));
  if (spec.rfind("offset:", 0) == 0) {
    const auto rest = spec.substr(7);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ValidationError("body: expected offset:v0,..,vd:T");
    const auto vals = parse_list(rest.substr(0, colon));
    if (static_cast<int>(vals.size()) != dim) throw ValidationError("body: offset vector has wrong length");
    return offset_body(sphere, Eigen::Map<const Vec>(vals.data(), dim), std::stod(rest.substr(colon + 1)));
  }
  throw ValidationError("body: unknown specification '" + spec + "'");
}

Body load_body(const std::string& support, const std::string& spec, std::shared_ptr<const AffineSphere> sphere) {
  if (!support.empty()) return make_body(parse_grid_csv(read_text(support)), sphere);
  return body_from_spec(spec.empty() ? "sigma:1" : spec, sphere);
}

struct TorusSetup {
  Instance inst;
  std::shared_ptr<FundamentalDomain> dom;
  std::shared_ptr<MaximalDomain> dmax;
};

TorusSetup torus_setup(const std::string& path, int n, int radius_grid) {
  TorusSetup t{load_instance(path), nullptr, nullptr};
  const GroupAction act = t.inst.action();
  t.dom = std::make_shared<FundamentalDomain>(t.inst.cone, act, n);
  t.dmax = std::make_shared<MaximalDomain>(maximal_domain(act, t.inst.cone, radius_grid));
  return t;
}

// Torus bodies: "sigma:T", "dmax", or a torus CSV.
TauBody load_tau_body(const TorusSetup& t, const std::string& support, const std::string& spec) {
  if (!support.empty()) {
    int n = 0;
    auto h = parse_torus_csv(read_text(support), &n);
    if (n != t.dom->n()) throw ValidationError("support: torus size does not match --torus");
    return make_tau_body(t.dom, t.dmax, std::move(h));
  }
  const std::string s = spec.empty() ? "sigma:0.5" : spec;
  if (s == "dmax") return sigma_offset(t.dom, t.dmax, 0.0);
  if (s.rfind("sigma:", 0) == 0) return sigma_offset(t.dom, t.dmax, std::stod(s.substr(6)));
  throw ValidationError("body: unknown torus body '" + s + "'");
}

std::vector<TorusRow> torus_rows(const TauBody& b) {
  std::vector<TorusRow> rows(b.h.size());
  for (std::size_t i = 0; i < b.h.size(); ++i) {
    const Vec th = b.dom->theta(i);
    const Vec& y = b.dom->y(i);
    rows[i].theta.assign(th.data(), th.data() + th.size());
    rows[i].y.assign(y.data(), y.data() + y.size());
    rows[i].h = b.h[i];
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conevex: convex geometry of cone-asymptotic domains"};
  app.require_subcommand(1);
  std::function<void()> run;

  // instance
  auto* inst_cmd = app.add_subcommand("instance", "Write an instance specification");
  std::string kind = "quadratic", inst_out = "instance.json", v_str = "1,0,0";
  int inst_d = 2, word_bound = 6;
  std::vector<std::string> eig_lists;
  inst_cmd->add_option("--kind", kind, "quadratic | simplicial-lattice-coboundary")
      ->check(CLI::IsMember({"quadratic", "simplicial-lattice-coboundary"}));
  inst_cmd->add_option("--d", inst_d, "Dimension of Omega*")->check(CLI::Range(1, 3));
  inst_cmd->add_option("--eigenvalues", eig_lists, "Ray eigenvalues of one generator (repeatable)");
  inst_cmd->add_option("--v", v_str, "Coboundary vector");
  inst_cmd->add_option("--word-bound", word_bound, "Word length of the cached group elements");
  inst_cmd->add_option("--out", inst_out);
  inst_cmd->callback([&] {
    run = [&] {
      json j;
      if (kind == "quadratic") {
        j = instance_to_json(ConeModel::quadratic(inst_d), {}, 0, std::nullopt);
      } else {
        const ConeModel cone = ConeModel::simplicial(inst_d);
        if (eig_lists.empty()) eig_lists = inst_d == 2 ? std::vector<std::string>{"2,1,0.5", "1,2,0.5"}
                                                       : std::vector<std::string>{};
        if (eig_lists.empty()) throw ValidationError("instance: --eigenvalues required for d != 2");
        const auto vv = parse_list(v_str);
        if (static_cast<int>(vv.size()) != inst_d + 1) throw ValidationError("instance: --v has wrong length");
        const Vec v = Eigen::Map<const Vec>(vv.data(), inst_d + 1);
        std::vector<Mat> mats;
        for (const auto& s : eig_lists) {
          const auto e = parse_list(s);
          if (static_cast<int>(e.size()) != inst_d + 1) throw ValidationError("instance: eigenvalue list has wrong length");
          double prod = 1.0;
          for (double x : e) {
            if (!(x > 0.0)) throw ValidationError("instance: eigenvalues must be positive");
            prod *= x;
          }
          if (std::abs(prod - 1.0) > 1e-12) throw ValidationError("instance: eigenvalues " + s + " violate det = 1");
          mats.push_back(diagonal_in_ray_basis(cone, Eigen::Map<const Vec>(e.data(), inst_d + 1)));
        }
        const GroupAction act = coboundary_cocycle(cone, mats, v, word_bound);
        j = instance_to_json(cone, act.generators(), word_bound, v);
      }
      write_text(inst_out, j.dump(2) + "\n");
    };
  });

  // shared options
  std::string instance_path, support, body_spec, out, measure_spec;
  int grid = 129, torus = 64;
  std::uint64_t seed = 0;

  // sphere
  auto* sph = app.add_subcommand("sphere", "Solve the affine-sphere equation on the Omega* grid");
  double tol = 1e-8, scale = 1.0;
  int max_iter = 60;
  bool closed = false;
  std::string diag_out;
  sph->add_option("--instance", instance_path)->required();
  sph->add_option("--grid", grid);
  sph->add_option("--tol", tol);
  sph->add_option("--max-iter", max_iter);
  sph->add_option("--scale", scale, "Initial-guess scale");
  sph->add_flag("--closed-form", closed, "Sample the closed-form sphere instead of solving");
  sph->add_option("--out", out)->required();
  sph->add_option("--diag", diag_out, "Diagnostics JSON (default <out>.diag.json)");
  sph->callback([&] {
    run = [&] {
      const Instance inst = load_instance(instance_path);
      SphereOptions opt;
      opt.tol = tol;
      opt.max_iter = max_iter;
      opt.initial_scale = scale;
      const auto t0 = std::chrono::steady_clock::now();
      const AffineSphere s = closed ? closed_form_sphere(inst.cone, grid) : solve_affine_sphere(inst.cone, grid, opt);
      const json header = output_header(inst, seed, grid_json(grid, inst.cone.d()));
      write_text(out, grid_csv(s.omega, header));
      json d{{"iterations", s.diag.iterations},
             {"final_update", s.diag.final_update},
             {"max_residual", s.diag.max_residual},
             {"update_history", vec_array(s.diag.update_history)},
             {"residual_history", vec_array(s.diag.residual_history)}};
      write_json(diag_out.empty() ? out + ".diag.json" : diag_out, header, d);
      std::cerr << "sphere: " << s.diag.iterations << " iterations, max residual " << s.diag.max_residual << ", "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
    };
  });

  // steiner
  auto* st = app.add_subcommand("steiner", "Area measures from the local Steiner formula");
  std::string eps_str, measures_prefix;
  double disk = 0.5;
  st->add_option("--instance", instance_path)->required();
  st->add_option("--grid", grid);
  st->add_option("--support", support, "Support function grid CSV");
  st->add_option("--body", body_spec, "cone | sigma:T | offset:v0,..,vd:T");
  st->add_option("--eps", eps_str, "d+1 distinct parallel distances");
  st->add_option("--disk", disk, "Radius of the cell set b");
  st->add_option("--out", out)->required();
  st->add_option("--measures", measures_prefix, "Prefix for per-coefficient measure CSVs");
  st->callback([&] {
    run = [&] {
      const Instance inst = load_instance(instance_path);
      auto sphere = std::make_shared<const AffineSphere>(closed_form_sphere(inst.cone, grid));
      const Body body = load_body(support, body_spec, sphere);
      const auto eps = eps_str.empty() ? default_steiner_nodes(inst.cone.d()) : parse_list(eps_str);
      const SteinerCoeffs c = steiner_fit(body, eps);
      CellSet b;
      for (std::size_t i : disk_cells(body.support, Vec::Zero(inst.cone.d()), disk))
        if (c.S[0].defined[i]) b.push_back(i);
      const json header = output_header(inst, seed, grid_json(grid, inst.cone.d()));
      json p{{"eps", vec_array(eps)}, {"condition", c.condition}, {"sigma_volume_b", sigma_volume(*sphere, b)}};
      json totals = json::array();
      for (std::size_t i = 0; i < c.S.size(); ++i) {
        totals.push_back(c.S[i].total(b));
        if (!measures_prefix.empty()) {
          std::vector<double> dens(c.S[i].mass.size());
          for (std::size_t k = 0; k < dens.size(); ++k) dens[k] = c.S[i].density(k);
          write_text(measures_prefix + "S" + std::to_string(i) + ".csv",
                     measure_csv(c.S[i].mass, dens, c.S[i].atom, header));
        }
      }
      p["S_totals"] = totals;
      write_json(out, header, p);
    };
  });

  // curvature
  auto* cu = app.add_subcommand("curvature", "C-curvature and its reciprocity with the area density");
  cu->add_option("--instance", instance_path)->required();
  cu->add_option("--grid", grid);
  cu->add_option("--support", support);
  cu->add_option("--body", body_spec);
  cu->add_option("--out", out)->required();
  cu->callback([&] {
    run = [&] {
      const Instance inst = load_instance(instance_path);
      auto sphere = std::make_shared<const AffineSphere>(closed_form_sphere(inst.cone, grid));
      const Body body = load_body(support, body_spec, sphere);
      const GridFn phi = c_curvature(body);
      write_text(out, grid_csv(phi, output_header(inst, seed, grid_json(grid, inst.cone.d()))));
    };
  });

  // covolume
  auto* co = app.add_subcommand("covolume", "Covolume of a tau-convex domain on the torus");
  std::size_t mc_samples = 0;
  int path_nodes = 8;
  co->add_option("--instance", instance_path)->required();
  co->add_option("--torus", torus, "Torus nodes per axis");
  co->add_option("--support", support, "Torus CSV of h = (s - s_tau)/omega");
  co->add_option("--body", body_spec, "dmax | sigma:T");
  co->add_option("--path-nodes", path_nodes);
  co->add_option("--mc-samples", mc_samples);
  co->add_option("--seed", seed);
  co->add_option("--out", out)->required();
  co->callback([&] {
    run = [&] {
      const TorusSetup t = torus_setup(instance_path, torus, 65);
      const TauBody b = load_tau_body(t, support, body_spec);
      const CovolumeReport r = covolume(b, path_nodes);
      json p{{"covolume", r.value},
             {"path_samples", r.path_samples},
             {"path_integrand", vec_array(r.path_integrand)},
             {"sigma_volume_F", t.dom->sigma_volume()},
             {"restored_nodes", r.restored_nodes}};
      if (mc_samples > 0) {
        const CovolumeMc mc = covolume_mc(b, t.dom->y(t.dom->size() / 2), mc_samples, seed);
        p["mc"] = json{{"estimate", mc.value}, {"stderr", mc.stderr_}, {"samples", mc.samples},
                       {"hits", mc.hits},      {"escapes", mc.escapes}, {"word_bound", mc.word_bound}};
      }
      write_json(out, output_header(t.inst, seed, grid_json(torus, t.inst.cone.d())), p);
    };
  });

  // invariant
  auto* iv = app.add_subcommand("invariant", "Equivariance, cosmological time and Dirichlet-Lee checks");
  bool check_eq = false;
  std::size_t dl_samples = 0;
  iv->add_option("--instance", instance_path)->required();
  iv->add_option("--torus", torus);
  iv->add_option("--grid", grid, "Omega* grid for the equivariance check");
  iv->add_option("--support", support);
  iv->add_option("--body", body_spec);
  iv->add_flag("--check-equivariance", check_eq);
  iv->add_option("--dl-sample", dl_samples);
  iv->add_option("--seed", seed);
  iv->add_option("--out", out);
  iv->callback([&] {
    run = [&] {
      const TorusSetup t = torus_setup(instance_path, torus, 65);
      const TauBody b = load_tau_body(t, support, body_spec);
      const auto ext = cosmological_extremes(b);
      json p{{"t_min", ext.t_min}, {"t_max", ext.t_max}, {"sigma_volume_F", t.dom->sigma_volume()}};
      if (check_eq) {
        // s = s_tau + h omega sampled on the Omega* grid, h taken from the torus cell.
        const FundamentalDomain& dom = *t.dom;
        const GridFn s = sample_omega_star(t.inst.cone, grid, [&](const Vec& y) {
          std::array<int, 3> wrap{};
          const std::size_t node = dom.locate(dom.xi_of_y(y), wrap);
          return t.dmax->value(y) + b.h[node] * dom.sphere().value(y);
        });
        const auto rep = equivariance_residual(s, dom.action(), t.inst.cone, dom.sphere(), 500, seed);
        p["equivariance"] = json{{"max_defect", rep.max_defect}, {"max_interp_bound", rep.max_interp_bound},
                                 {"max_excess", rep.max_excess}, {"samples", rep.samples}, {"skipped", rep.skipped}};
      }
      if (dl_samples > 0) {
        const Vec y0 = t.dom->y(t.dom->size() / 2);
        const auto rep = dirichlet_lee_covering(*t.dom, *t.dmax, y0, dl_samples, 0.05, 2.0, seed);
        json fails = json::array();
        for (const auto& P : rep.failures) fails.push_back(std::vector<double>(P.data(), P.data() + P.size()));
        p["dirichlet_lee"] = json{{"samples", rep.samples}, {"covered", rep.covered}, {"fraction", rep.fraction()},
                                  {"word_bound", t.dom->action().word_bound()}, {"uncovered_examples", fails}};
      }
      const json header = output_header(t.inst, seed, grid_json(torus, t.inst.cone.d()));
      if (out.empty())
        std::cout << header_line(header) << p.dump(2) << "\n";
      else
        write_json(out, header, p);
    };
  });

  // minkowski
  auto* mk = app.add_subcommand("minkowski", "Solve the Minkowski problem on the torus");
  std::string mode = "variational", trace_out, residual_out;
  double init = -1.0;
  mk->add_option("--instance", instance_path)->required();
  mk->add_option("--torus", torus);
  mk->add_option("--measure", measure_spec, "Measure CSV or sigma:T")->required();
  mk->add_option("--mode", mode)->check(CLI::IsMember({"variational", "newton"}));
  mk->add_option("--init", init, "Initial constant h (default matched t0)");
  mk->add_option("--out", out)->required();
  mk->add_option("--trace", trace_out, "Trace JSON (default <out>.trace.json)");
  mk->add_option("--residual", residual_out, "Per-cell residual CSV (default <out>.residual.csv)");
  mk->callback([&] {
    run = [&] {
      const TorusSetup t = torus_setup(instance_path, torus, 65);
      MinkowskiProblem pb{t.dom, t.dmax, {}, {}};
      if (measure_spec.rfind("sigma:", 0) == 0)
        pb.mu = sigma_offset_measure(*t.dom, std::stod(measure_spec.substr(6)));
      else
        pb.mu = parse_measure_csv(read_text(measure_spec));
      if (pb.mu.size() != t.dom->size()) throw ValidationError("minkowski: measure size does not match the torus");
      pb.config.mode = mode == "newton" ? MinkowskiMode::Newton : MinkowskiMode::Variational;
      pb.config.initial_offset = init;
      const MinkowskiResult r = solve_minkowski(pb);
      const json header = output_header(t.inst, seed, grid_json(torus, t.inst.cone.d()));
      write_text(out, torus_csv(torus_rows(r.body), torus, header));
      json rows = json::array();
      for (const auto& row : r.trace.rows)
        rows.push_back(json{{"iteration", row.iteration}, {"L", row.L}, {"tv", row.tv}, {"step", row.step},
                            {"backtracks", row.backtracks}, {"restored", row.restored}});
      write_json(trace_out.empty() ? out + ".trace.json" : trace_out, header,
                 json{{"converged", r.trace.converged}, {"message", r.trace.message}, {"rows", rows}});
      const ResidualReport res = minkowski_residual(r.body, pb.mu);
      std::ostringstream csv;
      csv << header_line(header) << "cell,diff\n";
      for (std::size_t i = 0; i < res.diff.size(); ++i) csv << i << ',' << fmt17(res.diff[i]) << '\n';
      write_text(residual_out.empty() ? out + ".residual.csv" : residual_out, csv.str());
      const auto guard = boundary_contact_guard(r.body);
      if (guard.flagged)
        std::cerr << "minkowski: T_min = " << guard.t_min << " below 3 grid spacings; possible boundary contact\n";
      if (!r.trace.converged) throw ConvergenceError("minkowski: " + r.trace.message);
    };
  });

  // report
  auto* rp = app.add_subcommand("report", "Turn run outputs into plot-ready CSV");
  std::string dir, out_dir;
  rp->add_option("--dir", dir)->required();
  rp->add_option("--out-dir", out_dir, "Defaults to --dir");
  rp->callback([&] {
    run = [&] {
      if (!fs::is_directory(dir)) throw ValidationError("report: not a directory: " + dir);
      const fs::path od = out_dir.empty() ? fs::path(dir) : fs::path(out_dir);
      fs::create_directories(od);
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      int produced = 0;
      auto ends_with = [](const std::string& s, const std::string& suf) {
        return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
      };
      for (const auto& f : files) {
        const std::string name = f.filename().string();
        const std::string text = read_text(f.string());
        const std::string header = text.substr(0, text.find('\n') + 1);
        std::ostringstream csv;
        csv << header;
        std::string target;
        if (ends_with(name, ".diag.json")) {
          const json p = read_payload(f.string());
          csv << "iteration,update,residual\n";
          const auto& u = p.at("update_history");
          const auto& r = p.at("residual_history");
          for (std::size_t i = 0; i < u.size(); ++i)
            csv << i + 1 << ',' << fmt17(u[i].get<double>()) << ',' << fmt17(i < r.size() ? r[i].get<double>() : 0.0)
                << '\n';
          target = name.substr(0, name.size() - 10) + ".residuals.csv";
        } else if (ends_with(name, ".trace.json")) {
          const json p = read_payload(f.string());
          csv << "iteration,L,tv,step\n";
          for (const auto& row : p.at("rows"))
            csv << row.at("iteration").get<int>() << ',' << fmt17(row.at("L").get<double>()) << ','
                << fmt17(row.at("tv").get<double>()) << ',' << fmt17(row.at("step").get<double>()) << '\n';
          target = name.substr(0, name.size() - 11) + ".trace.csv";
        } else if (ends_with(name, ".steiner.json")) {
          const json p = read_payload(f.string());
          csv << "i,S_total\n";
          const auto& s = p.at("S_totals");
          for (std::size_t i = 0; i < s.size(); ++i) csv << i << ',' << fmt17(s[i].get<double>()) << '\n';
          target = name.substr(0, name.size() - 13) + ".steiner.csv";
        } else if (ends_with(name, ".residual.csv")) {
          fs::copy_file(f, od / name, fs::copy_options::overwrite_existing);
          ++produced;
          continue;
        } else {
          continue;
        }
        write_text((od / target).string(), csv.str());
        ++produced;
      }
      if (produced == 0)
        throw ValidationError("report: no inputs in " + dir +
                              "; expected *.diag.json (sphere), *.trace.json and *.residual.csv (minkowski), "
                              "*.steiner.json (steiner)");
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    configure_threads_from_env();
    run();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid number: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
