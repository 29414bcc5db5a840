#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccm/error.hpp"
#include "ccm/spacetime.hpp"

namespace ccm {

namespace {

struct Plotted {
    std::string id;
    double t, x;
};

// Locations projected onto the (x1, t) plane.
std::vector<Plotted> plotted(const Embedding& e) {
    std::vector<Plotted> out;
    for (auto& [id, l] : e.locations) out.push_back({id, l.point.at(0).get_d(), l.point.at(1).get_d()});
    return out;
}

struct Frame {
    double x0, x1, t0, t1;
};

Frame frame_of(const std::vector<Plotted>& pts) {
    Frame f{-1, 1, -1, 1};
    if (!pts.empty()) {
        f = {pts[0].x, pts[0].x, pts[0].t, pts[0].t};
        for (auto& p : pts) {
            f.x0 = std::min(f.x0, p.x);
            f.x1 = std::max(f.x1, p.x);
            f.t0 = std::min(f.t0, p.t);
            f.t1 = std::max(f.t1, p.t);
        }
    }
    double span = std::max({f.x1 - f.x0, f.t1 - f.t0, 1.0});
    f.x0 -= span / 2;
    f.x1 += span / 2;
    f.t0 -= span / 4;
    f.t1 += span / 2;
    return f;
}

std::string finite_text(const Embedding& e) {
    std::ostringstream os;
    os << "finite poset with " << e.poset.elements().size() << " elements\n";
    for (auto& [a, b] : e.poset.covers()) os << "  " << a << " < " << b << "\n";
    for (auto& [id, l] : e.locations) {
        os << "  O(" << id << ") = " << l.element;
        if (!e.accessible_future && e.accessible.count(id)) {
            os << "   R(" << id << ") = {";
            const auto& r = e.accessible.at(id);
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "}";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace

std::string render_ascii(const Embedding& e, int width, int height) {
    if (e.poset.kind() == Poset::Kind::Finite) return finite_text(e);
    if (width < 11 || height < 5) throw Error(ErrorKind::InvalidInput, "diagram too small");
    auto pts = plotted(e);
    Frame f = frame_of(pts);
    std::vector<std::string> grid(height, std::string(width, ' '));
    auto col = [&](double x) { return static_cast<int>(std::lround((x - f.x0) / (f.x1 - f.x0) * (width - 1))); };
    auto row = [&](double t) { return static_cast<int>(std::lround((f.t1 - t) / (f.t1 - f.t0) * (height - 1))); };
    for (auto& p : pts)
        for (int r = row(p.t) - 1; r >= 0; --r) {
            double t = f.t1 - static_cast<double>(r) / (height - 1) * (f.t1 - f.t0);
            double dt = t - p.t;
            int cl = col(p.x - dt), cr = col(p.x + dt);
            if (cl >= 0 && cl < width && grid[r][cl] == ' ') grid[r][cl] = '\\';
            if (cr >= 0 && cr < width && grid[r][cr] == ' ') grid[r][cr] = '/';
        }
    for (auto& p : pts) {
        int r = row(p.t), c = col(p.x);
        if (r < 0 || r >= height) continue;
        grid[r][std::clamp(c, 0, width - 1)] = '*';
        for (std::size_t k = 0; k < p.id.size() && c + 1 + static_cast<int>(k) < width; ++k)
            grid[r][c + 1 + k] = p.id[k];
    }
    std::ostringstream os;
    os << "t ^   M(" << e.poset.spatial_dims() << "+1)"
       << (e.poset.spatial_dims() > 1 ? ", projected onto (x1, t)" : "") << "\n";
    for (auto& line : grid) {
        std::string l = line;
        l.erase(l.find_last_not_of(' ') + 1);
        os << "  | " << l << "\n";
    }
    os << "  +" << std::string(width + 1, '-') << "> x\n";
    for (auto& [id, l] : e.locations) os << "  " << id << " = " << location_text(l) << "\n";
    return os.str();
}

std::string render_svg(const Embedding& e) {
    const int w = 480, h = 360;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
       << " " << h << "\">\n";
    os << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    if (e.poset.kind() == Poset::Kind::Finite) {
        std::istringstream lines(finite_text(e));
        std::string line;
        int y = 24;
        while (std::getline(lines, line)) {
            os << "  <text x=\"12\" y=\"" << y << "\" font-family=\"monospace\" font-size=\"13\">" << line
               << "</text>\n";
            y += 18;
        }
        os << "</svg>\n";
        return os.str();
    }
    auto pts = plotted(e);
    Frame f = frame_of(pts);
    double scale = std::min(w / (f.x1 - f.x0), h / (f.t1 - f.t0));
    auto sx = [&](double x) { return (x - f.x0) * scale; };
    auto sy = [&](double t) { return h - (t - f.t0) * scale; };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
    std::size_t k = 0;
    for (auto& p : pts) {
        const char* c = palette[k++ % 7];
        double dt = f.t1 - p.t;
        os << "  <polygon points=\"" << sx(p.x) << "," << sy(p.t) << " " << sx(p.x - dt) << "," << sy(f.t1) << " "
           << sx(p.x + dt) << "," << sy(f.t1) << "\" fill=\"" << c << "\" fill-opacity=\"0.12\" stroke=\"" << c
           << "\" stroke-width=\"1\"/>\n";
    }
    k = 0;
    for (auto& p : pts) {
        const char* c = palette[k++ % 7];
        os << "  <circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.t) << "\" r=\"4\" fill=\"" << c << "\"/>\n";
        os << "  <text x=\"" << sx(p.x) + 6 << "\" y=\"" << sy(p.t) + 4 << "\" font-family=\"sans-serif\" "
           << "font-size=\"14\">" << p.id << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace ccm
