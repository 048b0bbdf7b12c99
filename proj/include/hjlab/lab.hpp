#ifndef HJLAB_LAB_HPP
#define HJLAB_LAB_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjlab/csv.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

struct RateOptions {
  std::vector<double> eps_list = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  double T = 1.0;
  std::vector<double> snapshots = {0.25, 0.5, 1.0};
  int cells0 = 32;        // initial cells per period; doubled until the budget gate passes
  int cells_max = 256;
  double budget_factor = 0.1;  // scheme estimate must be <= factor * measured error
  int table_p_steps = 32;
  double table_p_radius = 0.0;  // 0: auto from the data Lipschitz constant
  CellOptions cell;             // effective-table build options
};

struct RateRow {
  double eps = 0.0;
  int cells = 0;  // cells per period of the accepted run
  int nx = 0;
  double err = 0.0;         // sup |u_eps - u_bar| over stored snapshots
  double scheme_est = 0.0;  // grid-halving estimate of the scheme error
  bool budget_ok = false;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;  // log err = intercept + slope * log eps
  double residual = 0.0;   // max absolute fit deviation in log space
};

struct RateReport {
  std::string model_id;
  std::vector<RateRow> rows;
  SlopeFit fit;
  int n_ok = 0;            // budget-passing rows with positive error
  bool conclusive = false; // fit requires >= 4 passing rows
};

// Measures |u_eps - u_bar| across eps. The effective reference is the closed
// form when `exact_effective` is given, otherwise a same-grid solve driven by
// a tabulated effective Hamiltonian. Grid resolution escalates per row until
// the scheme-error estimate is within budget_factor of the measured error.
RateReport run_rate_experiment(const HamiltonianModel& m,
                               const std::function<double(const Pt&)>& g, const RateOptions& opt,
                               const std::function<double(const Pt&, double)>* exact_effective =
                                   nullptr);

// Least squares on (log eps, log err); throws on nonpositive entries.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows);

// columns: epsilon, sup_error, scheme_error, pass
CsvTable rate_report_csv(const RateReport& r);

// log-log plot: N circle markers, a fitted line, and a slope-one reference
// line (exactly two polylines); deterministic output
void write_svg_loglog(const std::string& path, const std::vector<double>& xs,
                      const std::vector<double>& ys, const SlopeFit& fit,
                      const std::string& title);

// The models exercised by the cross-model checks: all p-families over
// representative torus fields in both dimensions.
std::vector<HamiltonianModel> builtin_model_registry();

// "zero" | "sin[*amp]" | "cos[*amp]" | "tent[*amp]" (1-Lipschitz tent wave)
std::function<double(const Pt&)> make_initial_data(const std::string& spec, int dim);

// "key = value" lines, '#' comments; later keys win
std::map<std::string, std::string> parse_config(const std::string& path);

double cfg_double(const std::map<std::string, std::string>& c, const std::string& key, double dflt);
int cfg_int(const std::map<std::string, std::string>& c, const std::string& key, int dflt);
std::string cfg_str(const std::map<std::string, std::string>& c, const std::string& key,
                    const std::string& dflt);

}  // namespace hjlab

#endif
