#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bbeig/eigensolver.hpp"
#include "bbeig/geometry.hpp"

namespace bbeig {

struct PlacementSettings {
  double stride = 0.0;  // 0 selects max(4h, r(eps)/2)
  int top_k = 3;
  // Evaluate the coarse stage on a grid this many times coarser.
  int coarse_grid_factor = 1;
  int workers = 1;
  int subsamples = 4;
  EigenOptions eigen;
};

struct Candidate {
  Point center;
  double lambda;
};

struct TraceEntry {
  Point center;
  double lambda;
  bool accepted;
};

struct PlacementResult {
  Point center{0.0, 0.0};
  double lambda = 0.0;
  EigenResult eigen;
  int evaluations = 0;
  int accepted_moves = 0;
  std::vector<TraceEntry> trace;
  std::vector<Candidate> candidates;  // best coarse-stage candidates
};

// lambda^1 of the ball of measure eps as a function of its center on a fixed
// domain; evaluations are cached by center.
class PlacementProblem {
 public:
  PlacementProblem(DomainPtr domain, double eps, double m_bar, double m_under, PlacementSettings settings = {});

  const GridDomain& domain() const { return *domain_; }
  DomainPtr domain_ptr() const { return domain_; }
  double eps() const { return eps_; }
  double m_bar() const { return m_bar_; }
  double m_under() const { return m_under_; }
  double radius() const { return radius_; }
  const PlacementSettings& settings() const { return settings_; }
  double default_stride() const;

  bool admissible(const Point& center) const;
  double lambda(const Point& center);
  EigenResult eigenpair(const Point& center);
  WeightField weight(const Point& center) const;
  int evaluations() const { return evaluations_; }

  // Evaluations of many centers, split over the configured workers.
  std::vector<double> lambdas(const std::vector<Point>& centers, const DomainPtr& on_domain);

 private:
  DomainPtr domain_;
  double eps_;
  double m_bar_;
  double m_under_;
  double radius_;
  PlacementSettings settings_;
  std::shared_ptr<const StiffnessOperator> stiffness_;
  std::unique_ptr<PencilSolver> solver_;
  std::map<std::pair<long long, long long>, double> cache_;
  int evaluations_ = 0;
};

// Admissible nodes on a lattice of the given stride anchored at the incenter,
// evaluated and sorted ascending by (lambda, center); the best top_k returned.
std::vector<Candidate> coarse_search(PlacementProblem& problem, double stride);

// Compass search from start: +-x, +-y probes, first improvement accepted,
// step halved after a failed round. Steps are whole multiples of h, so every
// probe is a lattice translate of start; the last round uses step h.
PlacementResult refine(PlacementProblem& problem, const Point& start, double initial_step = 0.0);

// coarse_search, then refine from every candidate and from the incenter.
PlacementResult optimize_center(PlacementProblem& problem);

// Total order used to merge results.
bool placement_less(double lambda_a, const Point& a, double lambda_b, const Point& b);

}  // namespace bbeig
