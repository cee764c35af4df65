#include "framescale/family.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace framescale {

namespace {

using nlohmann::ordered_json;

Vec basis_vector(std::size_t dim, std::size_t i) {
    Vec v(dim, Scalar(0.0));
    v[i] = 1.0;
    return v;
}

[[noreturn]] void bad_vector(std::size_t index, const std::string& what) {
    std::ostringstream os;
    os << "vectors[" << index << "] " << what;
    fail(ErrorKind::input, os.str());
}

}  // namespace

std::uint64_t Rng::next() {
    // splitmix64
    std::uint64_t z = (x_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

Vec Rng::unit_vector(std::size_t dim) {
    Vec x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = complex_gaussian();
    const double n = norm(x);
    if (n == 0.0) return unit_vector(dim);
    for (Scalar& z : x) z /= n;
    return x;
}

void validate_family(const VectorFamily& f) {
    if (f.dim == 0) fail(ErrorKind::input, "family dimension must be at least 1");
    if (f.vectors.empty()) fail(ErrorKind::input, "family must contain at least one vector");
    for (std::size_t i = 0; i < f.vectors.size(); ++i) {
        const Vec& v = f.vectors[i];
        if (v.size() != f.dim) {
            std::ostringstream os;
            os << "has " << v.size() << " entries, expected dim " << f.dim;
            bad_vector(i + 1, os.str());
        }
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag())) {
                std::ostringstream os;
                os << "entry " << j + 1 << " is not finite";
                bad_vector(i + 1, os.str());
            }
            if (f.field == Field::real && v[j].imag() != 0.0) {
                std::ostringstream os;
                os << "entry " << j + 1 << " has an imaginary part in a real family";
                bad_vector(i + 1, os.str());
            }
        }
    }
}

Vec effective_vector(const VectorFamily& f, std::size_t k) {
    if (k == 0) fail(ErrorKind::input, "effective_vector: indices start at 1");
    const std::size_t n = f.count();
    if (k <= n) return f.vectors[k - 1];
    if (f.tail == TailMode::zero) return Vec(f.dim, Scalar(0.0));
    return f.vectors[(k - 1) % n];
}

std::size_t family_rank(const VectorFamily& f, double rank_tol) {
    return orthonormal_basis(f.dim, f.vectors, rank_tol).cols();
}

GeneratorKind generator_kind_from_name(const std::string& name) {
    if (name == "orthonormal") return GeneratorKind::orthonormal;
    if (name == "shifted_sum") return GeneratorKind::shifted_sum;
    if (name == "damped_tail") return GeneratorKind::damped_tail;
    if (name == "random_gaussian") return GeneratorKind::random_gaussian;
    if (name == "cyclic_spanning") return GeneratorKind::cyclic_spanning;
    fail(ErrorKind::input, "unknown generator kind: " + name);
}

const char* generator_kind_name(GeneratorKind kind) noexcept {
    switch (kind) {
        case GeneratorKind::orthonormal: return "orthonormal";
        case GeneratorKind::shifted_sum: return "shifted_sum";
        case GeneratorKind::damped_tail: return "damped_tail";
        case GeneratorKind::random_gaussian: return "random_gaussian";
        case GeneratorKind::cyclic_spanning: return "cyclic_spanning";
    }
    return "unknown";
}

VectorFamily generate_family(const GeneratorSpec& spec) {
    const std::size_t d = spec.dim;
    if (d == 0) fail(ErrorKind::input, "generator dimension must be at least 1");

    VectorFamily f;
    f.dim = d;
    f.field = Field::real;
    f.tail = TailMode::zero;

    switch (spec.kind) {
        case GeneratorKind::orthonormal: {
            if (spec.count != 0 && spec.count != d)
                fail(ErrorKind::input, "orthonormal generator requires count == dim");
            for (std::size_t n = 0; n < d; ++n) f.vectors.push_back(basis_vector(d, n));
            break;
        }
        case GeneratorKind::shifted_sum: {
            if (spec.count != 0 && spec.count != d)
                fail(ErrorKind::input, "shifted_sum generator requires count == dim");
            for (std::size_t n = 0; n < d; ++n) {
                Vec v = basis_vector(d, n);
                if (n + 1 < d) v[n + 1] = 1.0;
                f.vectors.push_back(std::move(v));
            }
            break;
        }
        case GeneratorKind::damped_tail: {
            const std::size_t count = spec.count == 0 ? d : spec.count;
            if (count < d)
                fail(ErrorKind::input, "damped_tail generator requires count >= dim");
            if (!(spec.damping > 0.0 && spec.damping < 1.0))
                fail(ErrorKind::input, "damping factor must lie in (0, 1)");
            for (std::size_t n = 1; n <= count; ++n) {
                Vec v(d, Scalar(0.0));
                v[0] = 1.0;
                const std::size_t j = std::min(n + 1, d);
                v[j - 1] += std::pow(spec.damping, static_cast<double>(n));
                f.vectors.push_back(std::move(v));
            }
            break;
        }
        case GeneratorKind::random_gaussian: {
            const std::size_t count = spec.count == 0 ? d : spec.count;
            if (count < d)
                fail(ErrorKind::input, "random_gaussian generator requires count >= dim");
            f.field = Field::cplx;
            Rng rng(spec.seed);
            for (std::size_t n = 0; n < count; ++n) {
                Vec v(d);
                for (std::size_t i = 0; i < d; ++i) v[i] = rng.complex_gaussian();
                f.vectors.push_back(std::move(v));
            }
            break;
        }
        case GeneratorKind::cyclic_spanning: {
            const std::size_t count = spec.count == 0 ? d : spec.count;
            if (count < d)
                fail(ErrorKind::input, "cyclic_spanning generator requires count >= dim");
            f.tail = TailMode::cyclic;
            for (std::size_t n = 0; n < count; ++n)
                f.vectors.push_back(basis_vector(d, n % d));
            break;
        }
    }

    validate_family(f);
    const std::size_t rank = family_rank(f, 1e-10);
    if (rank != d) {
        std::ostringstream os;
        os << "generated family is not total: rank " << rank << " of " << d;
        fail(ErrorKind::totality, os.str());
    }
    return f;
}

// -- JSON family file ---------------------------------------------------------
// {"field": "real"|"complex", "dim": d, "tail": "zero"|"cyclic",
//  "vectors": [[...], ...]}; complex entries are [re, im] pairs.

namespace {

Scalar parse_entry(const ordered_json& e, Field field, std::size_t vi, std::size_t ei) {
    const auto context = [&](const std::string& what) {
        std::ostringstream os;
        os << "entry " << ei + 1 << " " << what;
        bad_vector(vi + 1, os.str());
    };
    if (e.is_number()) return Scalar(e.get<double>(), 0.0);
    if (e.is_array()) {
        if (field == Field::real)
            context("is an [re, im] pair inside a real family");
        if (e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            context("is not an [re, im] pair of numbers");
        return Scalar(e[0].get<double>(), e[1].get<double>());
    }
    context("is neither a number nor an [re, im] pair");
    return Scalar(0.0);  // unreachable
}

}  // namespace

VectorFamily parse_family_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::parse, std::string("family JSON does not parse: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::parse, "family JSON root must be an object");

    VectorFamily f;
    const std::string field = j.value("field", std::string("complex"));
    if (field == "real")
        f.field = Field::real;
    else if (field == "complex")
        f.field = Field::cplx;
    else
        fail(ErrorKind::input, "field must be \"real\" or \"complex\", got \"" + field + "\"");

    if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
        fail(ErrorKind::input, "dim must be a positive integer");
    f.dim = j["dim"].get<std::size_t>();

    const std::string tail = j.value("tail", std::string("zero"));
    if (tail == "zero")
        f.tail = TailMode::zero;
    else if (tail == "cyclic")
        f.tail = TailMode::cyclic;
    else
        fail(ErrorKind::input, "tail must be \"zero\" or \"cyclic\", got \"" + tail + "\"");

    if (!j.contains("vectors") || !j["vectors"].is_array())
        fail(ErrorKind::input, "vectors must be an array of vectors");
    if (j["vectors"].empty()) fail(ErrorKind::input, "vectors array is empty (N >= 1 required)");

    for (std::size_t vi = 0; vi < j["vectors"].size(); ++vi) {
        const auto& row = j["vectors"][vi];
        if (!row.is_array()) bad_vector(vi + 1, "is not an array");
        Vec v;
        v.reserve(row.size());
        for (std::size_t ei = 0; ei < row.size(); ++ei)
            v.push_back(parse_entry(row[ei], f.field, vi, ei));
        f.vectors.push_back(std::move(v));
    }
    validate_family(f);
    return f;
}

std::string family_to_json(const VectorFamily& f) {
    ordered_json j;
    j["field"] = f.field == Field::real ? "real" : "complex";
    j["dim"] = f.dim;
    j["tail"] = f.tail == TailMode::zero ? "zero" : "cyclic";
    ordered_json vecs = ordered_json::array();
    for (const Vec& v : f.vectors) {
        ordered_json row = ordered_json::array();
        for (const Scalar& z : v) {
            if (f.field == Field::real)
                row.push_back(z.real());
            else
                row.push_back(ordered_json::array({z.real(), z.imag()}));
        }
        vecs.push_back(std::move(row));
    }
    j["vectors"] = std::move(vecs);
    return j.dump(2) + "\n";
}

VectorFamily parse_family_csv(std::istream& in) {
    VectorFamily f;
    f.field = Field::real;
    f.tail = TailMode::zero;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        Vec v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double x = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
                    ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                v.push_back(Scalar(x, 0.0));
            } catch (const std::exception&) {
                std::ostringstream os;
                os << "row " << row << ": cannot parse \"" << cell << "\" as a real number";
                fail(ErrorKind::parse, os.str());
            }
        }
        if (f.dim == 0) f.dim = v.size();
        f.vectors.push_back(std::move(v));
    }
    if (f.vectors.empty()) fail(ErrorKind::input, "CSV family is empty (N >= 1 required)");
    validate_family(f);
    return f;
}

std::string family_to_csv(const VectorFamily& f) {
    if (f.field != Field::real)
        fail(ErrorKind::input, "CSV export supports real families only");
    std::ostringstream os;
    for (const Vec& v : f.vectors) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) os << ',';
            os << ordered_json(v[i].real()).dump();
        }
        os << '\n';
    }
    return os.str();
}

VectorFamily load_family(const std::string& path, FileFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::input, "cannot open family file: " + path);
    if (format == FileFormat::csv) return parse_family_csv(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_family_json(buf.str());
}

void save_family(const VectorFamily& f, const std::string& path, FileFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::input, "cannot open output file: " + path);
    out << (format == FileFormat::csv ? family_to_csv(f) : family_to_json(f));
}

}  // namespace framescale
