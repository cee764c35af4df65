#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "framescale/linalg.hpp"

namespace framescale {

enum class Field { real, cplx };
enum class TailMode { zero, cyclic };
enum class FileFormat { json, csv };

// The total sequence (v_n): a finite list plus declared tail semantics.
// Zero tail makes every tail span eventually {0}; cyclic tail keeps it the
// whole space, so both branches of the construction are reachable.
struct VectorFamily {
    Field field = Field::cplx;
    std::size_t dim = 0;
    TailMode tail = TailMode::zero;
    std::vector<Vec> vectors;

    std::size_t count() const noexcept { return vectors.size(); }
};

void validate_family(const VectorFamily& f);

// v_k under the family's tail semantics, k >= 1.
Vec effective_vector(const VectorFamily& f, std::size_t k);

// Numerical rank of the stored vectors at rank_tol.
std::size_t family_rank(const VectorFamily& f, double rank_tol);

enum class GeneratorKind {
    orthonormal,
    shifted_sum,
    damped_tail,
    random_gaussian,
    cyclic_spanning
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::orthonormal;
    std::size_t dim = 0;
    std::size_t count = 0;  // 0 selects the kind's default
    double damping = 0.9;   // damped_tail only
    std::uint64_t seed = 0; // random_gaussian only
};

GeneratorKind generator_kind_from_name(const std::string& name);
const char* generator_kind_name(GeneratorKind kind) noexcept;

VectorFamily generate_family(const GeneratorSpec& spec);

VectorFamily load_family(const std::string& path, FileFormat format);
VectorFamily parse_family_json(const std::string& text);
VectorFamily parse_family_csv(std::istream& in);
void save_family(const VectorFamily& f, const std::string& path, FileFormat format);
std::string family_to_json(const VectorFamily& f);
std::string family_to_csv(const VectorFamily& f);

// Deterministic Gaussian source (splitmix64 + explicit Box-Muller); the
// stream does not depend on standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : x_(seed) {}

    double uniform();   // [0, 1)
    double gaussian();  // standard normal
    Scalar complex_gaussian() { double re = gaussian(); return {re, gaussian()}; }
    Vec unit_vector(std::size_t dim);  // normalized complex Gaussian

private:
    std::uint64_t next();
    std::uint64_t x_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace framescale
