#pragma once

#include <vector>

#include "cstrd/chain_connect.hpp"
#include "cstrd/geometry.hpp"

namespace cstrd {

inline constexpr double kSplitCloseThreshold = 0.75;
inline constexpr double kInformationThreshold = 180.0;  // degrees

// Region relaxation parameters: neighbourhood 45, tolerance 0.2, 3 std, derivative 2.
ConnectParams region_params();

// Fractional position of radius `r` between the rings on `ray`.
double ring_fraction(const Chain& inward, const Chain& outward, int ray, double r);

// True when every node lies strictly between the rings on its ray.
bool chain_within(const Chain& c, const Chain& inward, const Chain& outward);

// Nodes on the rays strictly between `left` and `right`, keeping a linearly
// varying fractional position between the two rings.
std::vector<Node> interpolate_between_rings(const Node& left, const Node& right, const Chain& inward,
                                            const Chain& outward, int nr, double cy, double cx);

// Closes `c` across its gap using both bounding rings.
void complete_chain_using_2_support_ring(const Chain& inward, const Chain& outward, Chain& c, double cy,
                                         double cx);

// Contiguous ray run [first, first+count) of a chain.
struct Piece {
  long source = -1;  // key of the chain the run belongs to
  int first_ray = 0;
  int count = 0;
};

// Pieces of the chains crossing `direction_ray` (Ch_j's endpoint ray) that lie
// beyond it on the `ep` side, cut again where they would reach Ch_j's other end.
std::vector<Piece> split_intersecting_chains(int direction_ray, const std::vector<Chain>& chains,
                                             const Chain& cj, Endpoint ep);

// Runs of `c` outside Ch_j's angular domain (0, 1 or 2 of them).
std::vector<Piece> runs_outside(const Chain& c, const Chain& cj);

class Postprocessor {
 public:
  Postprocessor(std::vector<Chain> chains, int nr, double cy, double cx);

  void run();
  const std::vector<Chain>& chains() const { return chains_; }
  std::vector<Chain> take() { return std::move(chains_); }

  // Region steps, addressed by chain keys of the bounding rings.
  bool split_and_connect_chains(long inward, long outward);
  bool connect_chains_if_there_is_enough_data(long inward, long outward);
  void complete_chains_if_required();

  std::vector<long> within_chains(long inward, long outward) const;

 private:
  struct Candidate {
    Piece piece;
    double euclidean = 0;
    double radial_diff = 0;
    bool valid = false;
  };

  int index_of(long key) const;
  const Chain& by_key(long key) const { return chains_[static_cast<std::size_t>(index_of(key))]; }
  Chain piece_chain(const Piece& p) const;
  std::vector<long> closed_rings() const;
  Candidate best_neighbour(long inward, long outward, long j, Endpoint ep,
                           const std::vector<long>& within) const;
  void connect_piece(long inward, long outward, long j, Endpoint ep, const Piece& piece);
  void renumber();

  std::vector<Chain> chains_;
  int nr_;
  double cy_, cx_;
  long next_key_ = 0;
};

std::vector<Chain> postprocess(std::vector<Chain> chains, int nr, double cy, double cx);

// Closed normal chains sorted by mean radius.
std::vector<Chain> final_rings(const std::vector<Chain>& chains);

}  // namespace cstrd
