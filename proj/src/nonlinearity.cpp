#include "dra/nonlinearity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace dra::nonlinearity {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_power(double y, double nu) {
  if (y == 0.0) return 0.0;  // sgn(0) := 0 for every nu
  return y * std::pow(std::abs(y), nu - 1.0);
}

}  // namespace

NonlinearMap NonlinearMap::identity() {
  NonlinearMap m;
  m.kind_ = Kind::Identity;
  m.sector_ = {1.0, 1.0};
  return m;
}

NonlinearMap NonlinearMap::sign_power(double nu, double domain_bound) {
  if (nu < 0.0) throw InvalidRange("sign-power exponent nu must be >= 0");
  if (!(domain_bound > 0.0)) throw InvalidRange("domain bound must be > 0");
  NonlinearMap m;
  m.kind_ = Kind::SignPower;
  m.p1_ = nu;
  m.domain_bound_ = domain_bound;
  if (nu == 1.0) {
    m.sector_ = {1.0, 1.0};
  } else if (nu < 1.0) {
    // ratio |y|^{nu-1} decreases in |y|; unbounded as y -> 0
    m.sector_ = {std::pow(domain_bound, nu - 1.0), kInf};
  } else {
    m.sector_ = {0.0, std::pow(domain_bound, nu - 1.0)};
  }
  return m;
}

NonlinearMap NonlinearMap::fixed_time(double nu1, double nu2,
                                      double domain_bound) {
  if (!(nu1 > 0.0 && nu1 < 1.0))
    throw InvalidRange("fixed-time exponent nu1 must be in (0, 1)");
  if (!(nu2 > 0.0)) throw InvalidRange("fixed-time exponent nu2 must be > 0");
  if (!(domain_bound > 0.0)) throw InvalidRange("domain bound must be > 0");
  NonlinearMap m;
  m.kind_ = Kind::FixedTime;
  m.p1_ = nu1;
  m.p2_ = nu2;
  m.domain_bound_ = domain_bound;
  // ratio(r) = r^{nu1-1} + r^{nu2-1} on (0, Y]
  auto ratio = [&](double r) {
    return std::pow(r, nu1 - 1.0) + std::pow(r, nu2 - 1.0);
  };
  double eps = ratio(domain_bound);
  if (nu2 > 1.0) {
    // interior minimum of the decreasing-then-increasing ratio
    const double r0 = std::pow((1.0 - nu1) / (nu2 - 1.0), 1.0 / (nu2 - nu1));
    if (r0 < domain_bound) eps = ratio(r0);
  }
  // the nu1 < 1 branch makes the ratio blow up near 0, so no finite K_g
  m.sector_ = {eps, kInf};
  return m;
}

NonlinearMap NonlinearMap::saturation(double kappa, double domain_bound) {
  if (!(kappa > 0.0)) throw InvalidRange("saturation level kappa must be > 0");
  if (!(domain_bound > 0.0)) throw InvalidRange("domain bound must be > 0");
  NonlinearMap m;
  m.kind_ = Kind::Saturation;
  m.p1_ = kappa;
  m.domain_bound_ = domain_bound;
  m.sector_ = {std::min(1.0, kappa / domain_bound), 1.0};
  return m;
}

NonlinearMap NonlinearMap::log_quantizer(double delta) {
  if (!(delta > 0.0)) throw InvalidRange("quantization level delta must be > 0");
  NonlinearMap m;
  m.kind_ = Kind::LogQuantizer;
  m.p1_ = delta;
  // first-order sector; exact ratio bounds are exp(+-delta/2)
  m.sector_ = {1.0 - delta / 2.0, 1.0 + delta / 2.0};
  return m;
}

NonlinearMap NonlinearMap::uniform_quantizer(double delta) {
  if (!(delta > 0.0)) throw InvalidRange("quantization level delta must be > 0");
  NonlinearMap m;
  m.kind_ = Kind::UniformQuantizer;
  m.p1_ = delta;
  m.sector_ = {0.0, 2.0};
  m.strongly_sign_preserving_ = false;  // dead band below delta/2
  return m;
}

NonlinearMap NonlinearMap::robust_dead_zone(double eps_hat, double d,
                                            double domain_bound) {
  if (!(eps_hat > 0.0 && eps_hat < 1.0))
    throw InvalidRange("dead-zone parameter must be in (0, 1)");
  if (!(d > 0.0)) throw InvalidRange("dead-zone width d must be > 0");
  NonlinearMap m;
  m.kind_ = Kind::RobustDeadZone;
  m.p1_ = eps_hat;
  m.p2_ = d;
  m.domain_bound_ = domain_bound;
  const double level = (1.0 - eps_hat) / (eps_hat * d);
  m.sector_ = {0.0, level / d};
  m.strongly_sign_preserving_ = false;
  return m;
}

NonlinearMap NonlinearMap::compose(NonlinearMap outer, NonlinearMap inner) {
  NonlinearMap m;
  m.kind_ = Kind::Compose;
  m.domain_bound_ = inner.domain_bound_;
  m.sector_ = {outer.sector_.epsilon * inner.sector_.epsilon,
               outer.sector_.k_g * inner.sector_.k_g};
  m.strongly_sign_preserving_ =
      outer.strongly_sign_preserving_ && inner.strongly_sign_preserving_;
  m.outer_ = std::make_shared<NonlinearMap>(std::move(outer));
  m.inner_ = std::make_shared<NonlinearMap>(std::move(inner));
  return m;
}

double eval(const NonlinearMap& map, double y) {
  switch (map.kind_) {
    case NonlinearMap::Kind::Identity:
      return y;
    case NonlinearMap::Kind::SignPower:
      return sign_power(y, map.p1_);
    case NonlinearMap::Kind::FixedTime:
      return sign_power(y, map.p1_) + sign_power(y, map.p2_);
    case NonlinearMap::Kind::Saturation:
      return std::clamp(y, -map.p1_, map.p1_);
    case NonlinearMap::Kind::LogQuantizer: {
      if (y == 0.0) return 0.0;
      const double delta = map.p1_;
      const double t = std::log(std::abs(y));
      const double q = delta * std::round(t / delta);
      return (y > 0.0 ? 1.0 : -1.0) * std::exp(q);
    }
    case NonlinearMap::Kind::UniformQuantizer:
      // round-to-nearest, ties away from zero, so the map stays odd
      return map.p1_ * std::round(y / map.p1_);
    case NonlinearMap::Kind::RobustDeadZone: {
      if (std::abs(y) <= map.p2_) return 0.0;
      const double level = (1.0 - map.p1_) / (map.p1_ * map.p2_);
      return y > 0.0 ? level : -level;
    }
    case NonlinearMap::Kind::Compose:
      return eval(*map.outer_, eval(*map.inner_, y));
  }
  return 0.0;
}

SectorAudit verify_sector(const NonlinearMap& map, double lo, double hi,
                          int samples) {
  if (!(lo < hi) || samples < 1)
    throw EmptyDomain("sector verification needs lo < hi and samples >= 1");
  SectorAudit out;
  out.epsilon_observed = kInf;
  out.kg_observed = 0.0;
  int used = 0;
  for (int s = 0; s < samples; ++s) {
    const double y =
        samples == 1 ? lo : lo + (hi - lo) * static_cast<double>(s) /
                                     static_cast<double>(samples - 1);
    if (std::abs(y) <= 1e-12) continue;
    const double r = std::abs(eval(map, y)) / std::abs(y);
    out.epsilon_observed = std::min(out.epsilon_observed, r);
    out.kg_observed = std::max(out.kg_observed, r);
    ++used;
  }
  if (used == 0) throw EmptyDomain("all sample points fell in the 0 neighborhood");
  out.holds = out.epsilon_observed >= map.sector().epsilon - 1e-12 &&
              out.kg_observed <= map.sector().k_g + 1e-12;
  return out;
}

std::string NonlinearMap::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Identity:
      os << "identity";
      break;
    case Kind::SignPower:
      os << "sgnpow(nu=" << p1_ << ")";
      break;
    case Kind::FixedTime:
      os << "fixedtime(nu1=" << p1_ << ",nu2=" << p2_ << ")";
      break;
    case Kind::Saturation:
      os << "sat(kappa=" << p1_ << ")";
      break;
    case Kind::LogQuantizer:
      os << "logq(delta=" << p1_ << ")";
      break;
    case Kind::UniformQuantizer:
      os << "uniq(delta=" << p1_ << ")";
      break;
    case Kind::RobustDeadZone:
      os << "deadzone(eps=" << p1_ << ",d=" << p2_ << ")";
      break;
    case Kind::Compose:
      os << outer_->describe() << " o " << inner_->describe();
      break;
  }
  return os.str();
}

namespace {

struct Lexer {
  std::string text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    if (start == pos)
      throw ParseError("expected identifier at position " +
                       std::to_string(start) + " in nonlinearity expression");
    return text.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    size_t consumed = 0;
    double v;
    try {
      v = std::stod(text.substr(pos), &consumed);
    } catch (const std::exception&) {
      throw ParseError("expected number at position " + std::to_string(pos) +
                       " in nonlinearity expression");
    }
    pos += consumed;
    return v;
  }
};

NonlinearMap build_map(const std::string& name,
                       const std::map<std::string, double>& kv) {
  auto get = [&](const std::string& key, double fallback,
                 bool required = false) {
    auto it = kv.find(key);
    if (it != kv.end()) return it->second;
    if (required)
      throw ParseError("nonlinearity '" + name + "' needs parameter '" + key +
                       "'");
    return fallback;
  };
  const double domain = get("domain", 1.0);
  if (name == "identity" || name == "id") return NonlinearMap::identity();
  if (name == "sgnpow" || name == "signpow")
    return NonlinearMap::sign_power(get("nu", 0.0, true), domain);
  if (name == "fixedtime" || name == "ft")
    return NonlinearMap::fixed_time(get("nu1", 0.0, true),
                                    get("nu2", 0.0, true), domain);
  if (name == "sat" || name == "saturation")
    return NonlinearMap::saturation(get("kappa", 0.0, true), domain);
  if (name == "logq" || name == "logquant")
    return NonlinearMap::log_quantizer(get("delta", 0.0, true));
  if (name == "uniq" || name == "uniquant")
    return NonlinearMap::uniform_quantizer(get("delta", 0.0, true));
  if (name == "deadzone" || name == "robust")
    return NonlinearMap::robust_dead_zone(get("eps", 0.0, true),
                                          get("d", 0.0, true), domain);
  throw ParseError("unknown nonlinearity: " + name);
}

NonlinearMap parse_term(Lexer& lex) {
  const std::string name = lex.ident();
  std::map<std::string, double> kv;
  if (lex.accept('(')) {
    if (!lex.accept(')')) {
      do {
        const std::string key = lex.ident();
        if (!lex.accept('='))
          throw ParseError("expected '=' after parameter '" + key + "'");
        kv[key] = lex.number();
      } while (lex.accept(','));
      if (!lex.accept(')'))
        throw ParseError("expected ')' in nonlinearity expression");
    }
  }
  return build_map(name, kv);
}

}  // namespace

NonlinearMap parse_expression(const std::string& text) {
  Lexer lex{text};
  NonlinearMap result = parse_term(lex);
  while (!lex.eof()) {
    const std::string op = lex.ident();
    if (op != "o")
      throw ParseError("expected composition operator 'o', got '" + op + "'");
    NonlinearMap inner = parse_term(lex);
    result = NonlinearMap::compose(std::move(result), std::move(inner));
  }
  return result;
}

}  // namespace dra::nonlinearity
