#pragma once

#include "deform/dgla.hpp"
#include "deform/simplicial.hpp"

#include <span>
#include <string>

namespace deform {

// A cosimplicial DGLA known on levels 0..top(). Structure maps act on coordinate
// vectors of a fixed degree and are R-linear, so they extend layer by layer.
class CosimplicialDgla {
public:
    virtual ~CosimplicialDgla() = default;
    virtual int top() const = 0;
    virtual const DglaModel& level(int n) const = 0;
    // f_*: level f.source -> level f.target.
    virtual Vec push(const MonotoneMap& f, int degree, std::span<const Rational> x) const = 0;
    // Human-readable location of a coordinate, for witnesses.
    virtual std::string locate(int n, int degree, int coordinate) const {
        return "level " + std::to_string(n) + " degree " + std::to_string(degree) + " coordinate " +
               std::to_string(coordinate);
    }
};

DglaElement push(const CosimplicialDgla& g, const MonotoneMap& f, const DglaElement& x);
// Cofaces and codegeneracies by index.
DglaElement coface(const CosimplicialDgla& g, int i, int n, const DglaElement& x);        // level n -> n + 1
DglaElement codegeneracy(const CosimplicialDgla& g, int i, int n, const DglaElement& x);  // level n -> n - 1
// Alternating sum of cofaces, level n -> n + 1.
DglaElement cosimplicial_differential(const CosimplicialDgla& g, int n, const DglaElement& x);

}  // namespace deform
