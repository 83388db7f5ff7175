#include "hpbem/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hpbem {

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}
} // namespace

std::string run_csv_header() {
    return "step,n_dof,eta_total,eta_neumann,eta_contact,eta_density,eta_compl,"
           "eta_penetration,eta_sign,eta_friction,eta_stick,newton_iters\n";
}

std::string run_csv_row(int step, const StepRecord& rec) {
    const ErrorBreakdown& e = rec.err;
    std::string row = std::to_string(step) + "," + std::to_string(rec.n_dof);
    row += "," + fmt(rec.err.eta_total());
    for (const Vec* term : {&e.neumann, &e.contact, &e.density, &e.compl_n,
                            &e.penetration, &e.sign_n, &e.friction, &e.stick})
        row += "," + fmt(term->sum());
    const int iters = rec.sol.coulomb_outer_iterations > 0
                          ? rec.sol.coulomb_outer_iterations
                          : rec.sol.newton_iterations;
    row += "," + std::to_string(iters) + "\n";
    return row;
}

std::string solution_profile_csv(const DiscreteSolution& sol, const Mesh& mesh,
                                 const DiscreteSpaces& spaces, int n_samples) {
    std::string out = "x1,u_n,u_t,lambda_n,lambda_t\n";
    // arclength positions along the contact part
    std::vector<std::size_t> contact = mesh.contact_elements();
    double total = 0.0;
    for (auto ie : contact) total += mesh.elements[ie].length();
    for (int k = 0; k < n_samples; ++k) {
        const double s = (k + 0.5) / n_samples * total;
        double acc = 0.0;
        for (auto ie : contact) {
            const Element& el = mesh.elements[ie];
            if (s <= acc + el.length() || ie == contact.back()) {
                const double tau = std::min(1.0, std::max(0.0, (s - acc) / el.length()));
                const Vec2 x = el.point(tau);
                const Vec2 uv = spaces.primal_value(sol.u, ie, tau);
                const Vec2 nt = spaces.multiplier_nt(sol.lam, ie, tau);
                out += fmt(x.x()) + "," + fmt(uv.dot(el.normal())) + "," +
                       fmt(uv.dot(el.tangent())) + "," + fmt(nt.x()) + "," +
                       fmt(nt.y()) + "\n";
                break;
            }
            acc += el.length();
        }
    }
    return out;
}

void dump_matrix(const std::string& dir, const std::string& name, const Mat& M) {
    nlohmann::json header;
    header["rows"] = M.rows();
    header["cols"] = M.cols();
    header["dtype"] = "float64";
    header["order"] = "row_major";
    header["endianness"] = "little";
    write_text_file(dir + "/" + name + ".json", header.dump(2));
    std::ofstream bin(dir + "/" + name + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write " + dir + "/" + name + ".bin");
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) {
            const double v = M(i, j);
            bin.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace hpbem
