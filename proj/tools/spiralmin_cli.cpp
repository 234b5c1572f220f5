// spiralmin command-line surface: catalog inspection, profile construction,
// steady-angle solving, product building, verification runs, identity sweeps
// and plot-ready exports.
//
// Exit codes: 0 pass, 1 verification/computation failure, 2 usage error.
// Reports are deterministic (fixed key order, %.17g floats, no timestamps);
// identical invocations produce byte-identical files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spiralmin/core.hpp"
#include "spiralmin/immersions.hpp"
#include "spiralmin/integrate.hpp"
#include "spiralmin/product.hpp"
#include "spiralmin/profile.hpp"
#include "spiralmin/report_io.hpp"
#include "spiralmin/verify.hpp"

namespace sm = spiralmin;

namespace {

std::string out_dir() {
  const char* env = std::getenv("SPIRALMIN_OUT_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (name.find('/') != std::string::npos) return name;  // explicit path wins
  return dir + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw sm::Error("cannot open output file: " + path);
  os << content;
}

// "--C2 auto1.5" resolves to 1.5 * c2_min(k1, k2, C1); plain numbers pass through
double resolve_c2(const std::string& spec, double k1, double k2, double C1,
                  double* multiplier = nullptr) {
  if (spec.rfind("auto", 0) == 0) {
    const double m = std::stod(spec.substr(4));
    if (multiplier) *multiplier = m;
    return m * sm::c2_min(k1, k2, C1).c2min;
  }
  if (multiplier) *multiplier = 0.0;
  return std::stod(spec);
}

sm::ImmersionSpec lookup_immersion(const std::string& name) {
  for (auto& e : sm::builtin_catalog())
    if (e.name == name) return e;
  if (name.rfind("real_equator(", 0) == 0 && name.back() == ')')
    return sm::real_equator(std::stoi(name.substr(13)));
  throw sm::Error("unknown catalog entry: " + name +
                  " (try `spiralmin catalog`)");
}

void require_integer_dims(double k1, double k2) {
  if (k1 < 1.0 || k2 < 1.0 || k1 != std::floor(k1) || k2 != std::floor(k2))
    throw CLI::ValidationError("--k1/--k2",
                               "k1, k2 must be integers >= 1 for this command");
}

struct ProductRun {
  sm::ImmersionSpec left, right;
  sm::ProfileParams params;
  double c2_mult = 0.0;
  sm::SpiralProduct product;
};

ProductRun make_product(const std::string& left_name, const std::string& right_name,
                        double C1, const std::string& c2_spec, int joints) {
  ProductRun run;
  run.left = lookup_immersion(left_name);
  run.right = lookup_immersion(right_name);
  run.params.k1 = run.left.k;
  run.params.k2 = run.right.k;
  run.params.C1 = C1;
  run.params.C2 =
      resolve_c2(c2_spec, run.params.k1, run.params.k2, C1, &run.c2_mult);
  const sm::C2Min cm = sm::c2_min(run.params.k1, run.params.k2, C1);
  sm::ProfileCurve curve =
      sm::integrate_profile(run.params, cm.s_star, 0.0, 0.0, joints);
  run.product = sm::build(run.left, run.right, std::move(curve));
  return run;
}

void product_params_json(sm::JsonWriter& w, const ProductRun& run,
                         const std::string& c2_spec) {
  w.key("params").begin_object();
  w.key("k1").value(run.params.k1);
  w.key("k2").value(run.params.k2);
  w.key("C1").value(run.params.C1);
  w.key("C2_spec").value(c2_spec);
  w.key("C2").value(run.params.C2);
  w.end_object();
}

void emit(const std::string& out_flag, const std::string& default_name,
          const std::string& content) {
  if (out_flag.empty() && default_name.empty()) {
    std::cout << content;
    return;
  }
  const std::string path =
      join_path(out_dir(), out_flag.empty() ? default_name : out_flag);
  write_file(path, content);
  std::cerr << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiral minimal products: construction and spectral verification"};
  app.require_subcommand(1);

  // ---- catalog ----
  auto* cat = app.add_subcommand("catalog", "list built-in immersions as JSON");
  std::string cat_out;
  bool cat_validate = false;
  cat->add_option("--out", cat_out, "output file (default: stdout)");
  cat->add_flag("--validate", cat_validate, "run validate_entry on each entry");

  // ---- profile ----
  auto* prof = app.add_subcommand("profile", "integrate a profile curve");
  double p_k1 = 1, p_k2 = 1, p_C1 = -1;
  std::string p_c2 = "auto1.5", p_out;
  double p_start = -1.0;
  int p_joints = 2, p_samples = 64;
  prof->add_option("--k1", p_k1, "left dimension (positive real)")->required();
  prof->add_option("--k2", p_k2, "right dimension (positive real)")->required();
  prof->add_option("--C1", p_C1, "first integral constant")->required();
  prof->add_option("--C2", p_c2, "C2 value or autoX (X * C2_min)")->required();
  prof->add_option("--s-start", p_start, "start angle (default: argmin seed)");
  prof->add_option("--joints", p_joints, "turning points to cross");
  prof->add_option("--samples", p_samples, "samples per arc");
  prof->add_option("--out", p_out, "output prefix (default: profile)");

  // ---- steady ----
  auto* st = app.add_subcommand("steady", "steady-magnitude angle and checks");
  double s_k1 = 1, s_k2 = 1;
  std::optional<double> s_C1, s_angle;
  std::string s_out;
  st->add_option("--k1", s_k1)->required();
  st->add_option("--k2", s_k2)->required();
  auto* oc1 = st->add_option("--C1", s_C1, "solve the steady angle for this C1");
  auto* oang = st->add_option("--s", s_angle, "evaluate at this angle instead");
  oc1->excludes(oang);
  st->add_option("--out", s_out, "output file (default: stdout)");

  // ---- build ----
  auto* bld = app.add_subcommand("build", "assemble a spiral product");
  std::string b_left, b_right, b_c2 = "auto1.5", b_out;
  double b_C1 = -1;
  int b_joints = 2;
  bld->add_option("--left", b_left)->required();
  bld->add_option("--right", b_right)->required();
  bld->add_option("--C1", b_C1)->required();
  bld->add_option("--C2", b_c2)->required();
  bld->add_option("--joints", b_joints);
  bld->add_option("--out", b_out, "output file (default: stdout)");

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "Takahashi verification of a product");
  std::string v_left, v_right, v_c2 = "auto1.5", v_out;
  double v_C1 = -1, v_tol = 1e-4, v_step = 1e-3;
  int v_joints = 2, v_grid = 10;
  ver->add_option("--left", v_left)->required();
  ver->add_option("--right", v_right)->required();
  ver->add_option("--C1", v_C1)->required();
  ver->add_option("--C2", v_c2)->required();
  ver->add_option("--tol", v_tol, "residual tolerance");
  ver->add_option("--grid", v_grid, "grid density per dimension");
  ver->add_option("--step", v_step, "finite-difference step");
  ver->add_option("--joints", v_joints);
  ver->add_option("--out", v_out, "output file (default: stdout)");

  // ---- identities ----
  auto* idn = app.add_subcommand("identities", "closed-form identity suite");
  double i_k1 = 1, i_k2 = 1, i_C1 = -1, i_tol = 1e-8;
  std::string i_c2 = "auto1.5", i_out;
  int i_points = 1000;
  idn->add_option("--k1", i_k1)->required();
  idn->add_option("--k2", i_k2)->required();
  idn->add_option("--C1", i_C1)->required();
  idn->add_option("--C2", i_c2)->required();
  idn->add_option("--points", i_points, "grid points inside J");
  idn->add_option("--tol", i_tol, "max residual tolerance");
  idn->add_option("--out", i_out, "output prefix (default: stdout JSON only)");

  // ---- sweep ----
  auto* sw = app.add_subcommand("sweep", "parameter sweep over C1 and C2 multipliers");
  double w_k1 = 1, w_k2 = 1, w_tol = 1e-4;
  std::vector<double> w_c1s;
  std::vector<double> w_mults;
  std::string w_out;
  int w_grid = 10, w_joints = 2;
  sw->add_option("--k1", w_k1)->required();
  sw->add_option("--k2", w_k2)->required();
  sw->add_option("--C1-list", w_c1s, "C1 values")->required()->delimiter(',');
  sw->add_option("--C2-mults", w_mults, "C2_min multipliers")->required()->delimiter(',');
  sw->add_option("--grid", w_grid, "grid density per dimension");
  sw->add_option("--joints", w_joints);
  sw->add_option("--tol", w_tol, "residual tolerance");
  sw->add_option("--out", w_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*cat) {
      auto entries = sm::builtin_catalog();
      if (cat_validate) {
        bool all = true;
        for (const auto& e : entries) {
          const sm::CatalogReport rep = sm::validate_entry(e, 10, 1e-5);
          std::cerr << e.name << ": residual_max "
                    << sm::format_g17(rep.takahashi_residual_max) << " eigen "
                    << sm::format_g17(rep.eigen_estimate) << " ctr "
                    << sm::format_g17(rep.ctr_residual_max)
                    << (rep.pass ? " PASS" : " FAIL") << "\n";
          all = all && rep.pass;
        }
        if (!all) return 1;
      }
      emit(cat_out, "", sm::catalog_json(entries));
      return 0;
    }

    if (*prof) {
      sm::ProfileParams params{p_k1, p_k2, p_C1, 0.0};
      double mult = 0.0;
      params.C2 = resolve_c2(p_c2, p_k1, p_k2, p_C1, &mult);
      const sm::C2Min cm = sm::c2_min(p_k1, p_k2, p_C1);
      const double start = p_start > 0.0 ? p_start : cm.s_star;
      sm::StepControl ctl;
      ctl.samples_per_arc = p_samples;
      const sm::ProfileCurve curve =
          sm::integrate_profile(params, start, 0.0, 0.0, p_joints, ctl);

      std::ostringstream csv;
      sm::write_samples_csv(curve, csv);
      sm::JsonWriter w;
      w.begin_object();
      w.key("command").value("profile");
      w.key("C2_spec").value(p_c2);
      w.key("C2_min").value(cm.c2min);
      w.key("curve");
      sm::curve_json(w, curve);
      w.end_object();

      const std::string prefix = p_out.empty() ? "profile" : p_out;
      write_file(join_path(out_dir(), prefix + ".csv"), csv.str());
      write_file(join_path(out_dir(), prefix + ".json"), w.str() + "\n");
      std::cerr << "wrote " << join_path(out_dir(), prefix + ".csv") << ", "
                << join_path(out_dir(), prefix + ".json") << "\n";
      return 0;
    }

    if (*st) {
      if (!s_C1 && !s_angle)
        throw CLI::ValidationError("--C1/--s", "one of --C1 or --s is required");
      const sm::SteadyReport rep =
          s_C1 ? sm::steady_check(s_k1, s_k2, *s_C1)
               : sm::steady_check_at_angle(s_k1, s_k2, *s_angle);
      sm::JsonWriter w;
      sm::steady_json(w, rep);
      emit(s_out, "", w.str() + "\n");
      return rep.pass ? 0 : 1;
    }

    if (*bld) {
      require_integer_dims(lookup_immersion(b_left).k, lookup_immersion(b_right).k);
      const ProductRun run = make_product(b_left, b_right, b_C1, b_c2, b_joints);
      const sm::ImmersionSpec desc = run.product.as_immersion_spec(
          "spiral(" + b_left + "," + b_right + ")");
      sm::JsonWriter w;
      w.begin_object();
      w.key("command").value("build");
      product_params_json(w, run, b_c2);
      w.key("immersion");
      sm::immersion_json(w, desc);
      w.key("curve");
      sm::curve_json(w, *run.product.curve);
      w.end_object();
      emit(b_out, "", w.str() + "\n");
      return 0;
    }

    if (*ver) {
      const ProductRun run = make_product(v_left, v_right, v_C1, v_c2, v_joints);
      sm::GridSpec grid;
      grid.per_dim = v_grid;
      sm::FdOptions fd;
      fd.step = v_step;
      const double lambda = 1.0 + run.params.k1 + run.params.k2;
      const sm::VerificationReport rep = sm::takahashi_residual(
          run.product, "spiral(" + v_left + "," + v_right + ")", lambda, grid,
          fd, v_tol);
      const sm::CtrReport ctr = sm::c_totally_real_test(run.product, 128, 1e-6);
      const bool ctr_expected = (v_C1 == -1.0);
      const bool pass = rep.pass && (ctr.pass == ctr_expected);

      sm::JsonWriter w;
      w.begin_object();
      w.key("command").value("verify");
      w.key("left").value(v_left);
      w.key("right").value(v_right);
      product_params_json(w, run, v_c2);
      w.key("verification");
      sm::verification_json(w, rep);
      w.key("ctr").begin_object();
      w.key("max_residual").value(ctr.max_residual);
      w.key("tol").value(ctr.tol);
      w.key("pass").value(ctr.pass);
      w.key("expected_pass").value(ctr_expected);
      w.end_object();
      w.key("pass").value(pass);
      w.end_object();
      emit(v_out, "", w.str() + "\n");
      std::cerr << "residual_max " << sm::format_g17(rep.residual_max)
                << " eigen " << sm::format_g17(rep.eigen_estimate)
                << " runtime " << sm::format_g17(rep.runtime_seconds) << "s\n";
      return pass ? 0 : 1;
    }

    if (*idn) {
      sm::ProfileParams params{i_k1, i_k2, i_C1, 0.0};
      params.C2 = resolve_c2(i_c2, i_k1, i_k2, i_C1);
      const auto grid = sm::identity_grid(params, i_points);
      const sm::IdentityReport rep = sm::identity_suite(params, grid);
      double worst = 0.0;
      for (const auto& [k, v] : rep.residuals) worst = std::max(worst, v);

      sm::JsonWriter w;
      w.begin_object();
      w.key("command").value("identities");
      w.key("k1").value(i_k1);
      w.key("k2").value(i_k2);
      w.key("C1").value(i_C1);
      w.key("C2_spec").value(i_c2);
      w.key("C2").value(params.C2);
      w.key("points").value(static_cast<std::size_t>(grid.size()));
      w.key("report");
      sm::identity_json(w, rep);
      w.key("worst").value(worst);
      w.key("tol").value(i_tol);
      w.key("pass").value(worst <= i_tol);
      w.end_object();

      if (i_out.empty()) {
        std::cout << w.str() << "\n";
      } else {
        std::ostringstream csv;
        sm::write_identity_csv(rep, csv);
        write_file(join_path(out_dir(), i_out + ".json"), w.str() + "\n");
        write_file(join_path(out_dir(), i_out + ".csv"), csv.str());
        std::cerr << "wrote " << join_path(out_dir(), i_out + ".json") << ", "
                  << join_path(out_dir(), i_out + ".csv") << "\n";
      }
      return worst <= i_tol ? 0 : 1;
    }

    if (*sw) {
      require_integer_dims(w_k1, w_k2);
      std::ostringstream csv;
      csv << "C1,C2_mult,C2,status,domain_width,half_period,joints,residual_max,"
             "eigen_estimate\n";
      const sm::ImmersionSpec left =
          w_k1 == 1 ? sm::legendrian_circle() : sm::real_equator(int(w_k1));
      const sm::ImmersionSpec right =
          w_k2 == 1 ? sm::legendrian_circle() : sm::real_equator(int(w_k2));
      for (double C1 : w_c1s) {
        const sm::C2Min cm = sm::c2_min(w_k1, w_k2, C1);
        for (double mult : w_mults) {
          sm::ProfileParams params{w_k1, w_k2, C1, mult * cm.c2min};
          csv << sm::format_g17(C1) << ',' << sm::format_g17(mult) << ','
              << sm::format_g17(params.C2) << ',';
          try {
            const sm::DomainJ dom = sm::find_domain(params);
            sm::ProfileCurve curve =
                sm::integrate_profile(params, cm.s_star, 0.0, 0.0, w_joints);
            const double half_period =
                curve.joints.size() >= 2 ? curve.joints[1] - curve.joints[0] : 0.0;
            const std::size_t joints = curve.joints.size();
            const sm::SpiralProduct prod = sm::build(left, right, std::move(curve));
            sm::GridSpec grid;
            grid.per_dim = w_grid;
            const sm::VerificationReport rep = sm::takahashi_residual(
                prod, "sweep", 1.0 + w_k1 + w_k2, grid, {}, w_tol);
            csv << "ok," << sm::format_g17(dom.width()) << ','
                << sm::format_g17(half_period) << ',' << joints << ','
                << sm::format_g17(rep.residual_max) << ','
                << sm::format_g17(rep.eigen_estimate) << '\n';
          } catch (const sm::Error& e) {
            std::string name = "Error";
            if (dynamic_cast<const sm::EmptyDomain*>(&e)) name = "EmptyDomain";
            if (dynamic_cast<const sm::OutsideDomain*>(&e)) name = "OutsideDomain";
            csv << name << ",,,,,\n";
          }
        }
      }
      emit(w_out, "", csv.str());
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const sm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
