#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace coreforge {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class ConstraintSense { le, ge, eq };
enum class ObjectiveSense { minimize, maximize };

struct LinearTerm {
    int var;
    double coef;
};

/// Product term coef * var_a * var_b.
struct BilinearTerm {
    int var_a;
    int var_b;
    double coef;
};

struct ModelVariable {
    std::string name;
    double lb = 0.0;
    double ub = kInfinity;
    VarKind kind = VarKind::continuous;
};

struct ModelConstraint {
    std::string name;
    std::vector<LinearTerm> terms;
    std::vector<BilinearTerm> bilinear;
    ConstraintSense sense = ConstraintSense::le;
    double rhs = 0.0;
};

/// Backend-agnostic optimization model: continuous and binary variables,
/// linear constraints, optional bilinear constraint terms.
class OptModel {
public:
    int add_continuous(std::string name, double lb = 0.0, double ub = kInfinity) {
        variables_.push_back({std::move(name), lb, ub, VarKind::continuous});
        return static_cast<int>(variables_.size()) - 1;
    }

    int add_binary(std::string name) {
        variables_.push_back({std::move(name), 0.0, 1.0, VarKind::binary});
        return static_cast<int>(variables_.size()) - 1;
    }

    void add_constraint(std::string name, std::vector<LinearTerm> terms, ConstraintSense sense,
                        double rhs, std::vector<BilinearTerm> bilinear = {}) {
        for (const auto& t : terms) check_var(t.var);
        for (const auto& t : bilinear) {
            check_var(t.var_a);
            check_var(t.var_b);
        }
        constraints_.push_back({std::move(name), std::move(terms), std::move(bilinear), sense, rhs});
    }

    void set_objective(ObjectiveSense sense, std::vector<LinearTerm> terms) {
        for (const auto& t : terms) check_var(t.var);
        objective_sense_ = sense;
        objective_ = std::move(terms);
    }

    int num_vars() const { return static_cast<int>(variables_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const std::vector<ModelVariable>& variables() const { return variables_; }
    const std::vector<ModelConstraint>& constraints() const { return constraints_; }
    ObjectiveSense objective_sense() const { return objective_sense_; }
    const std::vector<LinearTerm>& objective() const { return objective_; }

    bool has_integer_vars() const {
        for (const auto& v : variables_)
            if (v.kind == VarKind::binary) return true;
        return false;
    }

    bool has_bilinear() const {
        for (const auto& c : constraints_)
            if (!c.bilinear.empty()) return true;
        return false;
    }

    nlohmann::json to_json() const {
        nlohmann::json vars = nlohmann::json::array();
        for (const auto& v : variables_) {
            nlohmann::json jv{{"name", v.name}, {"integer", v.kind == VarKind::binary}};
            jv["lb"] = std::isfinite(v.lb) ? nlohmann::json(v.lb) : nlohmann::json();
            jv["ub"] = std::isfinite(v.ub) ? nlohmann::json(v.ub) : nlohmann::json();
            vars.push_back(jv);
        }
        nlohmann::json cons = nlohmann::json::array();
        for (const auto& c : constraints_) {
            nlohmann::json jc{{"name", c.name}, {"sense", sense_symbol(c.sense)}, {"rhs", c.rhs}};
            nlohmann::json terms = nlohmann::json::array();
            for (const auto& t : c.terms) terms.push_back({t.var, t.coef});
            jc["terms"] = terms;
            if (!c.bilinear.empty()) {
                nlohmann::json bilin = nlohmann::json::array();
                for (const auto& t : c.bilinear) bilin.push_back({t.var_a, t.var_b, t.coef});
                jc["bilinear"] = bilin;
            }
            cons.push_back(jc);
        }
        nlohmann::json obj_terms = nlohmann::json::array();
        for (const auto& t : objective_) obj_terms.push_back({t.var, t.coef});
        return nlohmann::json{
            {"vars", vars},
            {"constraints", cons},
            {"objective",
             {{"sense", objective_sense_ == ObjectiveSense::maximize ? "max" : "min"},
              {"terms", obj_terms}}}};
    }

    std::string export_lp() const;
    std::string export_mps() const;

private:
    static const char* sense_symbol(ConstraintSense s) {
        switch (s) {
            case ConstraintSense::le: return "<=";
            case ConstraintSense::ge: return ">=";
            case ConstraintSense::eq: return "=";
        }
        return "<=";
    }

    void check_var(int var) const {
        if (var < 0 || var >= num_vars()) throw std::invalid_argument("constraint references an undeclared variable");
    }

    std::vector<ModelVariable> variables_;
    std::vector<ModelConstraint> constraints_;
    ObjectiveSense objective_sense_ = ObjectiveSense::minimize;
    std::vector<LinearTerm> objective_;
};

namespace detail {

inline std::string format_coef(double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    return out.str();
}

inline void append_linear(std::ostringstream& out, const std::vector<LinearTerm>& terms,
                          const std::vector<ModelVariable>& vars) {
    bool first = true;
    for (const auto& t : terms) {
        double c = t.coef;
        if (c == 0) continue;
        if (first) {
            if (c < 0) out << "- ";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        double a = std::abs(c);
        if (a != 1.0) out << format_coef(a) << " ";
        out << vars[static_cast<std::size_t>(t.var)].name;
    }
    if (first) out << "0 " << vars.front().name;
}

}  // namespace detail

/// CPLEX LP text format. Bilinear terms render as quadratic constraint
/// brackets, matching the Gurobi/CPLEX extension.
inline std::string OptModel::export_lp() const {
    std::ostringstream out;
    out << (objective_sense_ == ObjectiveSense::maximize ? "Maximize" : "Minimize") << "\n obj: ";
    if (objective_.empty())
        out << "0 " << (variables_.empty() ? "dummy" : variables_.front().name);
    else
        detail::append_linear(out, objective_, variables_);
    out << "\nSubject To\n";
    for (const auto& c : constraints_) {
        out << " " << c.name << ": ";
        detail::append_linear(out, c.terms, variables_);
        if (!c.bilinear.empty()) {
            out << " + [ ";
            bool first = true;
            for (const auto& t : c.bilinear) {
                if (!first) out << (t.coef < 0 ? " - " : " + ");
                else if (t.coef < 0) out << "- ";
                first = false;
                double a = std::abs(t.coef);
                if (a != 1.0) out << detail::format_coef(a) << " ";
                out << variables_[static_cast<std::size_t>(t.var_a)].name << " * "
                    << variables_[static_cast<std::size_t>(t.var_b)].name;
            }
            out << " ]";
        }
        out << " " << sense_symbol(c.sense) << " " << detail::format_coef(c.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : variables_) {
        if (v.kind == VarKind::binary) continue;
        if (v.lb == -kInfinity && v.ub == kInfinity) {
            out << " " << v.name << " free\n";
        } else {
            out << " ";
            if (v.lb == -kInfinity)
                out << "-inf";
            else
                out << detail::format_coef(v.lb);
            out << " <= " << v.name << " <= ";
            if (v.ub == kInfinity)
                out << "+inf";
            else
                out << detail::format_coef(v.ub);
            out << "\n";
        }
    }
    bool any_binary = false;
    for (const auto& v : variables_) {
        if (v.kind == VarKind::binary) {
            if (!any_binary) out << "Binaries\n";
            any_binary = true;
            out << " " << v.name << "\n";
        }
    }
    out << "End\n";
    return out.str();
}

/// Free MPS format with OBJSENSE; quadratic constraints use QCMATRIX sections.
inline std::string OptModel::export_mps() const {
    std::ostringstream out;
    out << "NAME model\n";
    out << "OBJSENSE\n " << (objective_sense_ == ObjectiveSense::maximize ? "MAX" : "MIN") << "\n";
    out << "ROWS\n N obj\n";
    for (const auto& c : constraints_) {
        char type = c.sense == ConstraintSense::le ? 'L' : (c.sense == ConstraintSense::ge ? 'G' : 'E');
        out << " " << type << " " << c.name << "\n";
    }
    // columns, grouped per variable
    std::vector<std::vector<std::pair<std::string, double>>> entries(variables_.size());
    for (const auto& t : objective_)
        entries[static_cast<std::size_t>(t.var)].push_back({"obj", t.coef});
    for (const auto& c : constraints_)
        for (const auto& t : c.terms)
            entries[static_cast<std::size_t>(t.var)].push_back({c.name, t.coef});
    out << "COLUMNS\n";
    bool in_int = false;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        const auto& v = variables_[i];
        bool is_int = v.kind == VarKind::binary;
        if (is_int && !in_int) {
            out << " MARKER M1 'MARKER' 'INTORG'\n";
            in_int = true;
        } else if (!is_int && in_int) {
            out << " MARKER M2 'MARKER' 'INTEND'\n";
            in_int = false;
        }
        if (entries[i].empty()) out << " " << v.name << " obj 0\n";
        for (const auto& [row, coef] : entries[i])
            out << " " << v.name << " " << row << " " << detail::format_coef(coef) << "\n";
    }
    if (in_int) out << " MARKER M2 'MARKER' 'INTEND'\n";
    out << "RHS\n";
    for (const auto& c : constraints_)
        if (c.rhs != 0) out << " RHS " << c.name << " " << detail::format_coef(c.rhs) << "\n";
    out << "BOUNDS\n";
    for (const auto& v : variables_) {
        if (v.kind == VarKind::binary) {
            out << " BV BND " << v.name << "\n";
            continue;
        }
        if (v.lb == -kInfinity && v.ub == kInfinity) {
            out << " FR BND " << v.name << "\n";
            continue;
        }
        if (v.lb == -kInfinity)
            out << " MI BND " << v.name << "\n";
        else if (v.lb != 0)
            out << " LO BND " << v.name << " " << detail::format_coef(v.lb) << "\n";
        if (v.ub != kInfinity) out << " UP BND " << v.name << " " << detail::format_coef(v.ub) << "\n";
    }
    for (const auto& c : constraints_) {
        if (c.bilinear.empty()) continue;
        out << "QCMATRIX " << c.name << "\n";
        for (const auto& t : c.bilinear) {
            out << " " << variables_[static_cast<std::size_t>(t.var_a)].name << " "
                << variables_[static_cast<std::size_t>(t.var_b)].name << " "
                << detail::format_coef(t.coef) << "\n";
        }
    }
    out << "ENDATA\n";
    return out.str();
}

}  // namespace coreforge
