#pragma once

#include <functional>
#include <vector>

#include "hkv/kernels.hpp"
#include "hkv/ldata.hpp"

namespace hkv::detail {

// Bound of the form exp(min_c [log_maj(c) + shape(c, M)]).
struct tail_model {
    std::vector<double> c;
    std::vector<double> log_maj;
    std::function<double(double c, double M)> shape;

    double log_bound(double M) const;
};

// log |f| <= log M_c + dir c log x on a grid; entries the quadrature rejects are skipped
tail_model cutoff_tail_model(const cutoff_function& f, const std::vector<double>& grid);

// Smallest M on a geometric grid from start with log_bound(M) <= goal.
i64 pick_length(const tail_model& t, double goal, double start, i64 cap, const char* what);

// L(s, pi (x) chi) for every primitive even chi of g, product mode, cached.
struct character_L {
    std::vector<dirichlet_character> chars;
    std::vector<cplx> L;
    double bound = 0;  // largest per-value bar
};
character_L primitive_even_L(const isobaric_datum& d, const unit_group_ptr& g, cplx s);

// L(s, pi)
bounded_value untwisted_L(const isobaric_datum& d, cplx s);

}  // namespace hkv::detail
