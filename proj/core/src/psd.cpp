#include "radiomap/psd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "radiomap/linalg.hpp"
#include "radiomap/random.hpp"

namespace radiomap {

BemBasis::BemBasis(Eigen::VectorXd frequency_grid, Eigen::MatrixXd curves,
                   Eigen::VectorXd center_frequencies)
    : frequencies_(std::move(frequency_grid)), curves_(std::move(curves)),
      centers_(std::move(center_frequencies)) {
  if (curves_.cols() != frequencies_.size()) {
    throw std::invalid_argument("BemBasis: curves must be sampled on the frequency grid");
  }
  if (curves_.rows() > frequencies_.size()) {
    throw std::invalid_argument("BemBasis: cannot have more curves than grid frequencies");
  }
  if (centers_.size() != curves_.rows()) {
    throw std::invalid_argument("BemBasis: one center frequency per curve");
  }
  if (curves_.size() > 0 && curves_.minCoeff() < 0.0) {
    throw std::invalid_argument("BemBasis: curves must be nonnegative");
  }
  for (Eigen::Index f = 1; f < frequencies_.size(); ++f) {
    if (frequencies_(f) <= frequencies_(f - 1)) {
      throw std::invalid_argument("BemBasis: frequency grid must be strictly increasing");
    }
  }
  const Eigen::MatrixXd g = curves_ * curves_.transpose();
  const Eigen::VectorXd eigs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
  if (eigs.minCoeff() <= 1e-10) {
    throw std::invalid_argument("BemBasis: curves must be linearly independent");
  }
}

Eigen::VectorXd BemBasis::synthesize(const Eigen::VectorXd& coefficients) const {
  if (coefficients.size() != num_bands()) throw std::invalid_argument("synthesize: length mismatch");
  return curves_.transpose() * coefficients;
}

double BemBasis::integrate(const Eigen::VectorXd& psd) const {
  if (psd.size() != num_frequencies()) throw std::invalid_argument("integrate: length mismatch");
  double total = 0.0;
  for (Eigen::Index f = 1; f < frequencies_.size(); ++f) {
    total += 0.5 * (psd(f) + psd(f - 1)) * (frequencies_(f) - frequencies_(f - 1));
  }
  return total;
}

BemBasis raised_cosine_basis(const Eigen::VectorXd& frequency_grid, const Eigen::VectorXd& centers,
                             double bandwidth, double rolloff) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("raised_cosine_basis: bandwidth must be > 0");
  if (rolloff < 0.0 || rolloff > 1.0) {
    throw std::invalid_argument("raised_cosine_basis: rolloff must lie in [0, 1]");
  }
  Eigen::MatrixXd curves(centers.size(), frequency_grid.size());
  const double flat_edge = (1.0 - rolloff) * bandwidth / 2.0;
  const double outer_edge = (1.0 + rolloff) * bandwidth / 2.0;
  for (Eigen::Index c = 0; c < centers.size(); ++c) {
    for (Eigen::Index f = 0; f < frequency_grid.size(); ++f) {
      const double off = std::abs(frequency_grid(f) - centers(c));
      double v = 0.0;
      if (off <= flat_edge) {
        v = 1.0;
      } else if (off <= outer_edge && rolloff > 0.0) {
        v = 0.5 * (1.0 + std::cos(M_PI / (rolloff * bandwidth) * (off - flat_edge)));
      }
      curves(c, f) = v;
    }
  }
  return BemBasis(frequency_grid, std::move(curves), centers);
}

BemBasis indicator_basis(const Eigen::VectorXd& frequency_grid) {
  return BemBasis(frequency_grid,
                  Eigen::MatrixXd::Identity(frequency_grid.size(), frequency_grid.size()),
                  frequency_grid);
}

BemBasis flat_basis(const Eigen::VectorXd& frequency_grid) {
  Eigen::VectorXd center(1);
  center(0) = frequency_grid.size() > 0
                  ? 0.5 * (frequency_grid(0) + frequency_grid(frequency_grid.size() - 1))
                  : 0.0;
  return BemBasis(frequency_grid, Eigen::MatrixXd::Ones(1, frequency_grid.size()), center);
}

PsdMeasurementSet::PsdMeasurementSet(std::vector<Location> locations, Eigen::MatrixXd psd,
                                     double noise_variance)
    : locations_(std::move(locations)), psd_(std::move(psd)), noise_variance_(noise_variance) {
  if (static_cast<Eigen::Index>(locations_.size()) != psd_.rows()) {
    throw std::invalid_argument("PsdMeasurementSet: one PSD row per location");
  }
  if (psd_.size() > 0 && psd_.minCoeff() < 0.0) {
    throw std::invalid_argument("PsdMeasurementSet: PSD values must be nonnegative");
  }
  if (noise_variance_ < 0.0) throw std::invalid_argument("PsdMeasurementSet: noise variance < 0");
}

MeasurementSet PsdMeasurementSet::slice(Eigen::Index freq_index) const {
  std::vector<Measurement> ms;
  ms.reserve(locations_.size());
  for (std::size_t n = 0; n < locations_.size(); ++n) {
    Measurement m;
    m.location = locations_[n];
    m.value = psd_(static_cast<Eigen::Index>(n), freq_index);
    m.frequency_index = static_cast<int>(freq_index);
    ms.push_back(std::move(m));
  }
  return MeasurementSet(std::move(ms), noise_variance_, Unit::kLinearWatts);
}

void save_psd_measurements(const PsdMeasurementSet& set, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "x,y,z,f_index,value\n";
  char buf[32];
  for (std::size_t n = 0; n < set.size(); ++n) {
    const Location& loc = set.locations()[n];
    for (Eigen::Index f = 0; f < set.num_frequencies(); ++f) {
      for (int a = 0; a < 3; ++a) {
        if (a < loc.dim()) {
          std::snprintf(buf, sizeof buf, "%.17g", loc[a]);
          os << buf;
        }
        os << ',';
      }
      std::snprintf(buf, sizeof buf, "%.17g", set.psd()(static_cast<Eigen::Index>(n), f));
      os << f << ',' << buf << "\n";
    }
  }
}

PsdMeasurementSet load_psd_measurements(const std::string& path, double noise_variance) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y,z", 0) != 0) {
    throw std::runtime_error("psd csv: unexpected header");
  }
  std::vector<Location> locations;
  std::vector<std::vector<double>> rows;
  Eigen::Index num_freqs = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string x, y, z, f, v;
    std::getline(ss, x, ',');
    std::getline(ss, y, ',');
    std::getline(ss, z, ',');
    std::getline(ss, f, ',');
    std::getline(ss, v, ',');
    std::vector<double> coords;
    if (!x.empty()) coords.push_back(std::stod(x));
    if (!y.empty()) coords.push_back(std::stod(y));
    if (!z.empty()) coords.push_back(std::stod(z));
    const Location loc{std::span<const double>(coords)};
    const int fi = std::stoi(f);
    if (rows.empty() || !(locations.back() == loc)) {
      locations.push_back(loc);
      rows.emplace_back();
    }
    if (static_cast<int>(rows.back().size()) != fi) {
      throw std::runtime_error("psd csv: frequency indices must be contiguous per location");
    }
    rows.back().push_back(std::stod(v));
    num_freqs = std::max(num_freqs, static_cast<Eigen::Index>(rows.back().size()));
  }
  Eigen::MatrixXd psd(static_cast<Eigen::Index>(rows.size()), num_freqs);
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (static_cast<Eigen::Index>(rows[n].size()) != num_freqs) {
      throw std::runtime_error("psd csv: ragged frequency rows");
    }
    for (Eigen::Index f = 0; f < num_freqs; ++f) psd(static_cast<Eigen::Index>(n), f) = rows[n][static_cast<std::size_t>(f)];
  }
  return PsdMeasurementSet(std::move(locations), std::move(psd), noise_variance);
}

double PerFrequencyEstimate::evaluate(const Location& loc, Eigen::Index freq_index) const {
  return maps[static_cast<std::size_t>(freq_index)](loc);
}

PerFrequencyEstimate fit_per_frequency(const PsdMeasurementSet& data, const FitFunction& inner) {
  if (data.num_frequencies() < 1) throw std::invalid_argument("fit_per_frequency: need F >= 1");
  PerFrequencyEstimate est;
  est.maps.reserve(static_cast<std::size_t>(data.num_frequencies()));
  for (Eigen::Index f = 0; f < data.num_frequencies(); ++f) {
    est.maps.push_back(inner(data.slice(f)));
  }
  return est;
}

double NarrowbandEstimate::evaluate(const Location& loc, Eigen::Index freq_index) const {
  double v = 0.0;
  for (std::size_t s = 0; s < gain_maps.size(); ++s) {
    v += gain_maps[s](loc) * tx_psd(static_cast<Eigen::Index>(s), freq_index);
  }
  return v;
}

NarrowbandEstimate fit_narrowband(const PsdMeasurementSet& data, int num_sources, std::uint64_t seed,
                                  const FitFunction& spatial, int max_sweeps, double fit_tolerance) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index f = data.num_frequencies();
  const Eigen::Index s = num_sources;
  if (s < 1 || f < s) throw std::invalid_argument("fit_narrowband: need F >= S >= 1");
  if (n < s) throw std::invalid_argument("fit_narrowband: need at least S sensors");

  const Eigen::MatrixXd& m = data.psd();

  // Alternating nonnegative factor updates (HALS): each rank-1 block is
  // refreshed in closed form with projection, so the fit is monotone.
  // The factorization is nonconvex; a few seeded restarts pick the best
  // stationary point, deterministically in the caller's seed.
  NarrowbandEstimate est;
  Eigen::MatrixXd h, p;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 5; ++restart) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    Eigen::MatrixXd h_try(n, s), p_try(s, f);
    for (Eigen::Index i = 0; i < n; ++i) h_try.row(i) = uniform_vector(rng, s, 0.1, 1.0).transpose();
    for (Eigen::Index i = 0; i < s; ++i) p_try.row(i) = uniform_vector(rng, f, 0.1, 1.0).transpose();

    std::vector<double> history;
    double prev = (m - h_try * p_try).squaredNorm();
    history.push_back(prev);
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      for (Eigen::Index k = 0; k < s; ++k) {
        Eigen::MatrixXd r = m - h_try * p_try + h_try.col(k) * p_try.row(k);
        const double pp = p_try.row(k).squaredNorm();
        if (pp > 0.0) h_try.col(k) = (r * p_try.row(k).transpose() / pp).cwiseMax(0.0);
        const double hh = h_try.col(k).squaredNorm();
        if (hh > 0.0) p_try.row(k) = (h_try.col(k).transpose() * r / hh).cwiseMax(0.0);
      }
      const double obj = (m - h_try * p_try).squaredNorm();
      history.push_back(obj);
      const double change = std::abs(prev - obj) / std::max(1.0, std::abs(prev));
      prev = obj;
      if (change <= fit_tolerance) {
        converged = true;
        break;
      }
    }
    if (prev < best_obj) {
      best_obj = prev;
      h = h_try;
      p = p_try;
      est.objective_history = std::move(history);
      est.converged = converged;
    }
  }

  // Fix the scale ambiguity: unit-sum PSD rows.
  for (Eigen::Index k = 0; k < s; ++k) {
    const double row_sum = p.row(k).sum();
    if (row_sum > 0.0) {
      p.row(k) /= row_sum;
      h.col(k) *= row_sum;
    }
  }
  // Source identity is permutation-ambiguous; order by total power.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return h.col(a).sum() > h.col(b).sum();
  });
  Eigen::MatrixXd h_sorted(n, s), p_sorted(s, f);
  for (Eigen::Index k = 0; k < s; ++k) {
    h_sorted.col(k) = h.col(order[static_cast<std::size_t>(k)]);
    p_sorted.row(k) = p.row(order[static_cast<std::size_t>(k)]);
  }

  est.tx_psd = std::move(p_sorted);
  est.gains_at_sensors = h_sorted;
  for (Eigen::Index k = 0; k < s; ++k) {
    std::vector<Measurement> ms;
    ms.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      Measurement mm;
      mm.location = data.locations()[static_cast<std::size_t>(i)];
      mm.value = h_sorted(i, k);
      ms.push_back(std::move(mm));
    }
    est.gain_maps.push_back(spatial(MeasurementSet(std::move(ms), data.noise_variance(),
                                                   Unit::kLinearWatts)));
  }
  return est;
}

double WidebandBemEstimate::evaluate(const Location& loc, Eigen::Index freq_index) const {
  double v = 0.0;
  for (std::size_t c = 0; c < coefficient_maps.size(); ++c) {
    v += coefficient_maps[c](loc) * curves(static_cast<Eigen::Index>(c), freq_index);
  }
  return v;
}

WidebandBemEstimate fit_wideband_bem(const PsdMeasurementSet& data, const BemBasis& basis,
                                     const FitFunction& inner) {
  if (data.num_frequencies() != basis.num_frequencies()) {
    throw std::invalid_argument("fit_wideband_bem: frequency grid mismatch");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index c = basis.num_bands();

  WidebandBemEstimate est;
  est.curves = basis.curves();
  est.sensor_coefficients.resize(n, c);
  const Eigen::MatrixXd design = basis.curves().transpose();  // F x C
  for (Eigen::Index i = 0; i < n; ++i) {
    est.sensor_coefficients.row(i) = nnls(design, data.psd().row(i).transpose()).transpose();
  }
  for (Eigen::Index k = 0; k < c; ++k) {
    std::vector<Measurement> ms;
    ms.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      Measurement mm;
      mm.location = data.locations()[static_cast<std::size_t>(i)];
      mm.value = est.sensor_coefficients(i, k);
      ms.push_back(std::move(mm));
    }
    est.coefficient_maps.push_back(inner(MeasurementSet(std::move(ms), data.noise_variance(),
                                                        Unit::kLinearWatts)));
  }
  return est;
}

}  // namespace radiomap
