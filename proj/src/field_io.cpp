#include "rnls/field_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rnls {

void save_field(const std::filesystem::path& path, const RadialField& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const auto& grid = *u.grid();
    out << "# radial-field v1 r_max=" << std::setprecision(17) << grid.r_max()
        << " n=" << grid.n() << "\n";
    out << std::setprecision(17);
    bool complex_valued = u.values().imag().cwiseAbs().maxCoeff() != 0.0;
    for (int j = 0; j < grid.n(); ++j) {
        out << grid.nodes()[j] << " " << u.values()[j].real();
        if (complex_valued) out << " " << u.values()[j].imag();
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

RadialField load_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string header;
    std::getline(in, header);
    double r_max = 0;
    int n = 0;
    {
        auto rp = header.find("r_max=");
        auto np = header.find("n=");
        if (header.rfind("# radial-field v1", 0) != 0 || rp == std::string::npos ||
            np == std::string::npos)
            throw std::runtime_error("bad field file header: " + header);
        r_max = std::stod(header.substr(rp + 6));
        n = std::stoi(header.substr(np + 2));
    }

    Eigen::VectorXd r(n);
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("field file truncated at node " + std::to_string(j));
        std::istringstream ls(line);
        double rr, re, im = 0;
        if (!(ls >> rr >> re)) throw std::runtime_error("bad field file line: " + line);
        ls >> im;
        r[j] = rr;
        v[j] = {re, im};
    }

    // Infer grid kind from the first node.
    GridPtr grid;
    const double uniform_r1 = r_max / n;
    if (std::abs(r[0] - uniform_r1) < 1e-9 * r_max)
        grid = make_grid(r_max, n, GridKind::UniformTrapezoid);
    else
        grid = make_grid(r_max, n, GridKind::GaussBessel);
    for (int j = 0; j < n; ++j)
        if (std::abs(grid->nodes()[j] - r[j]) > 1e-8 * r_max)
            throw std::runtime_error("field file nodes do not match a known grid layout");
    return RadialField(grid, std::move(v));
}

}  // namespace rnls
