#pragma once

// Published reference values. Strings are kept verbatim so that no digit
// is lost; `value()` converts at the caller's precision.

#include "tfsolve/precision.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>

namespace tfsolve {

struct ReferenceValue {
  std::string_view key;
  std::string_view value;
  std::string_view citation;
};

struct AtomTableRow {
  int x;
  std::string_view u;
  std::string_view du;
};

/// One row of the Hermite-Pade error table: errors in x0 from the Taylor
/// series through order N, the two quadratic roots, and their average.
struct ShaferErrorRow {
  int K;
  int N;
  std::string_view taylor;
  std::string_view first_root;
  std::string_view second_root;
  std::string_view average;
};

/// v-series estimate with its published count of correct digits.
struct VSeriesRow {
  int M;
  bool pade;
  std::string_view u0_prime;
  int u0_prime_digits;
  std::string_view x0;
};

struct SmallNRow {
  int N;
  std::string_view x0;
  std::string_view x0_error;
  std::string_view u0_prime;
};

class ReferenceStore {
 public:
  static std::span<const ReferenceValue> all() { return values_; }

  static const ReferenceValue& get(std::string_view key) {
    for (const auto& v : values_)
      if (v.key == key) return v;
    throw ValidationError("unknown reference constant: " + std::string(key));
  }

  static Real value(std::string_view key, const PrecisionContext& ctx) { return ctx.real(get(key).value); }

  /// Significant digits carried by the stored string.
  static int digits(std::string_view key) {
    int n = 0;
    bool leading = true;
    for (char c : get(key).value) {
      if (c == 'e' || c == 'E') break;
      if (c < '0' || c > '9') continue;
      if (leading && c == '0') continue;
      leading = false;
      ++n;
    }
    return n;
  }

  static std::span<const AtomTableRow> atom_table() { return atom_table_; }
  static std::span<const ShaferErrorRow> shafer_errors() { return shafer_errors_; }
  static std::span<const VSeriesRow> vseries() { return vseries_; }
  static std::span<const SmallNRow> small_n() { return small_n_; }
  /// Cubic eliminant in lambda of the one-coefficient collocation
  /// system, ascending powers.
  static std::span<const std::string_view> small_n_cubic() { return cubic_; }
  /// Chebyshev coefficients a_0..a_22 of the magnetic solution in z.
  static std::span<const std::string_view> chebyshev_coefficients() { return cheb_; }

 private:
  static constexpr std::array<ReferenceValue, 8> values_{{
      {"atom_slope", "-1.588071022611375312718684508",
       "neutral atom critical slope u'(0), Hankel-determinant estimate (27 digits)"},
      {"atom_slope_integration", "-1.588071022611375312718684",
       "neutral atom critical slope u'(0), numerical integration with bisection"},
      {"magnetic_slope", "-0.9389668876439588930550534018746018038328937073944",
       "magnetic-field atom critical slope u'(0), Hankel-determinant estimate (49 digits)"},
      {"magnetic_slope_50", "-0.93896688764395889305505340187460180383289370739437",
       "magnetic-field atom critical slope u'(0), Chebyshev collocation (50 digits)"},
      {"magnetic_x0", "3.06885718281479942624073100623167158584582595057745",
       "magnetic-field atom endpoint x0 where u and u' vanish, Chebyshev collocation (50 digits)"},
      {"cheb_n1_lambda", "34.33616", "lowest-order collocation (one coefficient), physical eigenparameter lambda"},
      {"cheb_n1_d1", "1.31544", "lowest-order collocation (one coefficient), physical d1"},
      {"cheb_n4_x0_error", "0.19274e-4", "four-coefficient collocation, error in x0"},
  }};

  static constexpr std::array<AtomTableRow, 101> atom_table_{{
      {0, "1.", "-1.5880710226114"},
      {10, "0.024314292988681", "-0.0046028818712693"},
      {20, "0.0057849411915669", "-0.00064725433277769"},
      {30, "0.0022558366162029", "-0.00018067000647699"},
      {40, "0.0011136356388334", "-0.000069668028540326"},
      {50, "0.0006322547829849", "-0.000032498902048259"},
      {60, "0.00039391136668542", "-0.0000171977000831"},
      {70, "0.00026226529981201", "-9.9565333930524e-6"},
      {80, "0.00018354575974071", "-6.1661955287641e-6"},
      {90, "0.00013354582895373", "-4.0244737037667e-6"},
      {100, "0.00010024256813941", "-2.7393510686783e-6"},
      {110, "0.000077192183914122", "-1.9299022690995e-6"},
      {120, "0.000060724454048042", "-1.3992583170223e-6"},
      {130, "0.000048642170611589", "-1.0395157118193e-6"},
      {140, "0.000039574139448193", "-7.8856447021428e-7"},
      {150, "0.000032633964446257", "-6.0913994786089e-7"},
      {160, "0.000027231036946158", "-4.7807415548727e-7"},
      {170, "0.000022961351007399", "-3.8051134288369e-7"},
      {180, "0.000019542101672266", "-3.0666432312939e-7"},
      {190, "0.000016771248041131", "-2.4992901331678e-7"},
      {200, "0.000014501803496946", "-2.0575323164753e-7"},
      {210, "0.00001262507868731", "-1.7093867858999e-7"},
      {220, "0.000011059514500269", "-1.4319925950792e-7"},
      {230, "9.7430900509356e-6", "-1.2087522043829e-7"},
      {240, "8.6280669794388e-6", "-1.0274430764511e-7"},
      {250, "7.6772907646176e-6", "-8.7894679831444e-8"},
      {260, "6.8615483807441e-6", "-7.5637914908074e-8"},
      {270, "6.1576544141983e-6", "-6.544852781645e-8"},
      {280, "5.5470471166532e-6", "-5.6921313455898e-8"},
      {290, "5.0147463894448e-6", "-4.9740860705699e-8"},
      {300, "4.548571953617e-6", "-4.3659496185299e-8"},
      {310, "4.1385507917383e-6", "-3.8481144114006e-8"},
      {320, "3.7764638007387e-6", "-3.4049389482697e-8"},
      {330, "3.4554958931053e-6", "-3.0238562022714e-8"},
      {340, "3.1699637128939e-6", "-2.6947014494947e-8"},
      {350, "2.9151021105849e-6", "-2.4092011004349e-8"},
      {360, "2.6868954790918e-6", "-2.1605807799308e-8"},
      {370, "2.4819436135582e-6", "-1.9432625152504e-8"},
      {380, "2.2973543393218e-6", "-1.7526290677749e-8"},
      {390, "2.1306570419327e-6", "-1.5848392577797e-8"},
      {400, "1.9797326281136e-6", "-1.4366823059949e-8"},
      {410, "1.842756484985e-6", "-1.3054622396184e-8"},
      {420, "1.7181517839461e-6", "-1.1889056199565e-8"},
      {430, "1.6045510644226e-6", "-1.0850874763838e-8"},
      {440, "1.5007644808624e-6", "-9.9237153936954e-9"},
      {450, "1.4057534397658e-6", "-9.0936176860656e-9"},
      {460, "1.3186086183364e-6", "-8.3486285238475e-9"},
      {470, "1.2385315617813e-6", "-7.6784786982998e-9"},
      {480, "1.1648192165876e-6", "-7.0743170080134e-9"},
      {490, "1.0968508828835e-6", "-6.5284906994362e-9"},
      {500, "1.034077168203e-6", "-6.0343634424472e-9"},
      {510, "9.7601060362214e-7", "-5.5861638415855e-9"},
      {520, "9.2221764589762e-7", "-5.1788588934186e-9"},
      {530, "8.7231183937678e-7", "-4.8080479060999e-9"},
      {540, "8.2594795176694e-7", "-4.4698732683358e-9"},
      {550, "7.828169303947e-7", "-4.160945144665e-9"},
      {560, "7.4264155197267e-7", "-3.878277722421e-9"},
      {570, "7.0517266036529e-7", "-3.6192350738087e-9"},
      {580, "6.7018590439059e-7", "-3.3814850478544e-9"},
      {590, "6.3747890208209e-7", "-3.1629598899054e-9"},
      {600, "6.0686876967458e-7", "-2.9618225150474e-9"},
      {610, "5.7818996335412e-7", "-2.7764375473743e-9"},
      {620, "5.5129238991189e-7", "-2.6053463881518e-9"},
      {630, "5.2603974917333e-7", "-2.4472456993964e-9"},
      {640, "5.0230807668597e-7", "-2.3009687906329e-9"},
      {650, "4.7998445984162e-7", "-2.1654694798767e-9"},
      {660, "4.5896590454401e-7", "-2.0398080686052e-9"},
      {670, "4.3915833284169e-7", "-1.9231391273669e-9"},
      {680, "4.2047569473637e-7", "-1.8147008358921e-9"},
      {690, "4.0283917973564e-7", "-1.7138056608835e-9"},
      {700, "3.861765157183e-7", "-1.6198321874803e-9"},
      {710, "3.7042134437901e-7", "-1.5322179478635e-9"},
      {720, "3.5551266396608e-7", "-1.4504531135232e-9"},
      {730, "3.4139433126073e-7", "-1.3740749371114e-9"},
      {740, "3.2801461580316e-7", "-1.3026628461653e-9"},
      {750, "3.1532580027683e-7", "-1.2358341048206e-9"},
      {760, "3.032838217405e-7", "-1.1732399713605e-9"},
      {770, "2.918479490687e-7", "-1.1145622894042e-9"},
      {780, "2.8098049253898e-7", "-1.0595104590168e-9"},
      {790, "2.7064654200495e-7", "-1.0078187412534e-9"},
      {800, "2.6081373052692e-7", "-9.59243855836e-10"},
      {810, "2.5145202070801e-7", "-9.135628369537e-10"},
      {820, "2.4253351131026e-7", "-8.7057111672569e-10"},
      {830, "2.3403226200994e-7", "-8.3008080977438e-10"},
      {840, "2.2592413439939e-7", "-7.9191917572404e-10"},
      {850, "2.1818664755992e-7", "-7.5592723934792e-10"},
      {860, "2.1079884671993e-7", "-7.2195855060047e-10"},
      {870, "2.0374118367901e-7", "-6.8987806894922e-10"},
      {880, "1.9699540782507e-7", "-6.5956115831007e-10"},
      {890, "1.9054446669994e-7", "-6.3089268053242e-10"},
      {900, "1.8437241518212e-7", "-6.0376617681006e-10"},
      {910, "1.7846433245545e-7", "-5.7808312764064e-10"},
      {920, "1.7280624602028e-7", "-5.5375228304499e-10"},
      {930, "1.6738506208215e-7", "-5.3068905571025e-10"},
      {940, "1.6218850172182e-7", "-5.0881497055441e-10"},
      {950, "1.5720504231184e-7", "-4.8805716494193e-10"},
      {960, "1.5242386369939e-7", "-4.6834793442266e-10"},
      {970, "1.4783479872324e-7", "-4.4962431943178e-10"},
      {980, "1.4342828767613e-7", "-4.3182772888659e-10"},
      {990, "1.3919533636191e-7", "-4.1490359705517e-10"},
      {1000, "1.3512747743129e-7", "-3.9880107046013e-10"},
  }};

  static constexpr std::array<ShaferErrorRow, 6> shafer_errors_{{
      {2, 7, "0.0039", "0.0023", "0.044", "0.023"},
      {5, 16, "0.00076", "0.00093", "0.000052", "0.00043"},
      {10, 31, "0.174e-3", "0.265e-6", "0.32e-6", "0.31e-7"},
      {15, 46, "0.69e-4", "0.11e-8", "0.11e-8", "0.32e-11"},
      {20, 61, "0.35e-4", "0.15e-11", "0.15e-11", "0.45e-15"},
      {25, 76, "0.21e-4", "0.11e-12", "0.11e-12", "0.39e-18"},
  }};

  static constexpr std::array<VSeriesRow, 10> vseries_{{
      {10, false, "-0.9364", 2, "3.068806"},
      {10, true, "-0.9327", 2, "3.06877"},
      {20, false, "-0.93879", 3, "3.0688560"},
      {20, true, "-0.9389645", 5, "3.068857176"},
      {40, false, "-0.938966834", 7, "3.06885718271"},
      {40, true, "-0.93896688760", 9, "3.068857182814799451"},
      {60, false, "-0.938966887635", 10, "3.0688571828147917"},
      {60, true, "-0.9389668876439554", 14, "3.06885718281479942624073139"},
      {80, false, "-0.9389668876439574", 14, "3.0688571828147994255"},
      {80, true, "-0.9389668876439588927", 17, "3.068857182814799426240731006231672626130"},
  }};

  static constexpr std::array<SmallNRow, 4> small_n_{{
      {1, "3.11809", "0.049", "-2.73"},
      {2, "3.07417", "0.0053", "-.281"},
      {3, "3.0687055", "-0.00015", "-.89047"},
      {4, "3.068876456", "0.19274e-4", "-.9237607"},
  }};

  static constexpr std::array<std::string_view, 4> cubic_{{"2705319/4194304", "1643895/268435456",
                                                           "-51182361/68719476736", "1240029/2199023255552"}};

  static constexpr std::array<std::string_view, 23> cheb_{{
      "5.48135788388634344e-01",
      "-5.58881613523477153e-01",
      "-6.42705283349619230e-02",
      "5.70880541499120995e-02",
      "1.61861107728602653e-02",
      "1.78344934649533460e-03",
      "-4.97638953814069498e-05",
      "9.88568187276911699e-06",
      "-1.57314041941070364e-06",
      "2.17031601079801803e-07",
      "-3.17277060187282838e-08",
      "6.73733273124207577e-09",
      "-1.91849909540107163e-09",
      "5.43530178894964329e-10",
      "-1.37539658139417754e-10",
      "3.12411846416475022e-11",
      "-6.65185565734159168e-12",
      "1.41167490452475800e-12",
      "-3.15485896233555226e-13",
      "7.52433060541288362e-14",
      "-1.85848288796828985e-14",
      "4.57976772880843444e-15",
      "-1.10484891112084068e-15",
  }};
};

}  // namespace tfsolve
