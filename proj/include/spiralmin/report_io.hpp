#pragma once

// Deterministic report serialization. JSON is emitted with fixed key order,
// 17-significant-digit floats and LF line endings so identical inputs produce
// byte-identical files; CSV uses '.' decimals, ',' separators and a mandatory
// header row. Timings never enter a report body.

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spiralmin/immersions.hpp"
#include "spiralmin/integrate.hpp"
#include "spiralmin/verify.hpp"

namespace spiralmin {

class JsonWriter {
 public:
  JsonWriter& begin_object() {
    sep();
    out_ += '{';
    first_ = true;
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    first_ = false;
    return *this;
  }
  JsonWriter& begin_array() {
    sep();
    out_ += '[';
    first_ = true;
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    first_ = false;
    return *this;
  }
  JsonWriter& key(const std::string& k) {
    sep();
    out_ += '"' + escape(k) + "\":";
    first_ = true;  // next value attaches without a comma
    return *this;
  }
  JsonWriter& value(double v) {
    sep();
    out_ += format_g17(v);
    return *this;
  }
  JsonWriter& value(int v) {
    sep();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(std::size_t v) {
    sep();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(bool v) {
    sep();
    out_ += v ? "true" : "false";
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    sep();
    out_ += '"' + escape(v) + '"';
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }

  const std::string& str() const { return out_; }

 private:
  void sep() {
    if (!first_) out_ += ',';
    first_ = false;
  }
  static std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  }
  std::string out_;
  bool first_ = true;
};

// ---------------------------------------------------------------------------
// catalog / immersion descriptions
// ---------------------------------------------------------------------------

inline void immersion_json(JsonWriter& w, const ImmersionSpec& s) {
  w.begin_object();
  w.key("name").value(s.name);
  w.key("k").value(s.k);
  w.key("ambient_complex_dim").value(s.ambient_complex_dim);
  w.key("claims").begin_object();
  w.key("minimal").value(s.claims.minimal);
  w.key("c_totally_real").value(s.claims.c_totally_real);
  w.key("real_valued").value(s.claims.real_valued);
  w.end_object();
  w.key("claimed_eigenvalue").value(s.claimed_eigenvalue);
  w.end_object();
}

inline std::string catalog_json(const std::vector<ImmersionSpec>& entries) {
  JsonWriter w;
  w.begin_object();
  w.key("catalog").begin_array();
  for (const auto& e : entries) immersion_json(w, e);
  w.end_array();
  w.end_object();
  return w.str() + "\n";
}

// ---------------------------------------------------------------------------
// profile curve exports
// ---------------------------------------------------------------------------

inline void write_samples_csv(const ProfileCurve& c, std::ostream& os) {
  os << "t_arc,s,s1,s2,a,b,branch_sign\n";
  for (const auto& ps : c.samples)
    os << format_g17(ps.t_arc) << ',' << format_g17(ps.s) << ','
       << format_g17(ps.s1) << ',' << format_g17(ps.s2) << ','
       << format_g17(std::cos(ps.s)) << ',' << format_g17(std::sin(ps.s)) << ','
       << ps.branch_sign << '\n';
}

inline void curve_json(JsonWriter& w, const ProfileCurve& c) {
  w.begin_object();
  w.key("params").begin_object();
  w.key("k1").value(c.params.k1);
  w.key("k2").value(c.params.k2);
  w.key("C1").value(c.params.C1);
  w.key("C2").value(c.params.C2);
  w.end_object();
  w.key("domain").begin_object();
  w.key("s_lo").value(c.domain.s_lo);
  w.key("s_hi").value(c.domain.s_hi);
  w.key("lo_kind").value(c.domain.lo_kind == EndpointKind::denominator_root
                             ? "denominator_root"
                             : "open_boundary");
  w.key("hi_kind").value(c.domain.hi_kind == EndpointKind::denominator_root
                             ? "denominator_root"
                             : "open_boundary");
  w.key("extra_components").begin_array();
  for (const auto& [lo, hi] : c.domain.extra_components) {
    w.begin_array();
    w.value(lo);
    w.value(hi);
    w.end_array();
  }
  w.end_array();
  w.end_object();
  w.key("joints").begin_array();
  for (double t : c.joints) w.value(t);
  w.end_array();
  w.key("t_end").value(c.t_end());
  w.key("samples").value(c.samples.size());
  w.key("interpolation").value(c.interpolation);
  w.end_object();
}

// ---------------------------------------------------------------------------
// verification / identity / steady reports
// ---------------------------------------------------------------------------

inline void verification_json(JsonWriter& w, const VerificationReport& r) {
  w.begin_object();
  w.key("subject").value(r.subject);
  w.key("expected_lambda").value(r.expected_lambda);
  w.key("grid").value(r.grid);
  w.key("residual_max").value(r.residual_max);
  w.key("residual_mean").value(r.residual_mean);
  w.key("eigen_estimate").value(r.eigen_estimate);
  w.key("per_identity").begin_object();
  for (const auto& [k, v] : r.per_identity) w.key(k).value(v);
  w.end_object();
  w.key("tolerance").value(r.tolerance);
  w.key("pass").value(r.pass);
  w.end_object();
}

inline void identity_json(JsonWriter& w, const IdentityReport& r) {
  w.begin_object();
  w.key("residuals").begin_object();
  for (const auto& [k, v] : r.residuals) w.key(k).value(v);
  w.end_object();
  w.key("samples").value(r.samples.size());
  w.end_object();
}

inline void write_identity_csv(const IdentityReport& r, std::ostream& os) {
  os << "s,I,II,III,IV,X,im_part,re_part\n";
  for (const auto& t : r.samples)
    os << format_g17(t.s) << ',' << format_g17(t.I) << ',' << format_g17(t.II)
       << ',' << format_g17(t.III) << ',' << format_g17(t.IV) << ','
       << format_g17(t.X) << ',' << format_g17(t.im_part) << ','
       << format_g17(t.re_part) << '\n';
}

inline void steady_json(JsonWriter& w, const SteadyReport& r) {
  w.begin_object();
  w.key("k1").value(r.k1);
  w.key("k2").value(r.k2);
  w.key("C1").value(r.C1);
  w.key("s").value(r.s);
  w.key("C2").value(r.C2);
  w.key("s1p_sq").value(r.s1p_sq);
  w.key("expected_s1p_sq").value(r.expected_s1p_sq);
  w.key("re_part").value(r.re_part);
  w.key("all_roots").begin_array();
  for (double s : r.all_roots) w.value(s);
  w.end_array();
  w.key("pass").value(r.pass);
  w.end_object();
}

}  // namespace spiralmin
