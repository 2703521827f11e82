#include "actgram/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "actgram/error.hpp"

namespace actgram {

std::string Rgb::hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

const std::vector<Rgb>& palette(Level level) {
    // pimp bpos mpos spos const sneg mneg bneg nimp
    static const std::vector<Rgb> prim{{103, 0, 13},   {203, 24, 29},  {251, 106, 74}, {252, 187, 161}, {200, 200, 200},
                                       {158, 202, 225}, {66, 146, 198}, {8, 69, 148},   {63, 0, 125}};
    // a i d k c u
    static const std::vector<Rgb> mc{{44, 160, 44}, {214, 39, 40}, {31, 119, 180},
                                     {170, 170, 170}, {148, 103, 189}, {188, 189, 34}};
    // PS PL FX CT AL SH N
    static const std::vector<Rgb> llb{{214, 39, 40},  {31, 119, 180}, {127, 127, 127}, {148, 103, 189},
                                      {44, 160, 44},  {255, 127, 14}, {240, 228, 66}};
    switch (level) {
        case Level::Primitive: return prim;
        case Level::Composition: return mc;
        case Level::Behavior: return llb;
    }
    return llb;
}

namespace {

std::array<double, 3> to_lab(const Rgb& c) {
    auto lin = [](std::uint8_t v) {
        const double s = v / 255.0;
        return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
    };
    const double r = lin(c.r), g = lin(c.g), b = lin(c.b);
    const double x = (0.4124 * r + 0.3576 * g + 0.1805 * b) / 0.95047;
    const double y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
    const double z = (0.0193 * r + 0.1192 * g + 0.9505 * b) / 1.08883;
    auto f = [](double t) { return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0; };
    return {116.0 * f(y) - 16.0, 500.0 * (f(x) - f(y)), 200.0 * (f(y) - f(z))};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

double color_distance(const Rgb& a, const Rgb& b) {
    const auto la = to_lab(a), lb = to_lab(b);
    return std::hypot(la[0] - lb[0], la[1] - lb[1], la[2] - lb[2]);
}

std::array<std::size_t, kNumPhases> plot_widths(const std::vector<GrammarMatrix>& matrices, Level level) {
    std::array<std::size_t, kNumPhases> w{};
    for (const auto& m : matrices) {
        for (Axis a : kAllAxes) {
            for (Phase p : kAllPhases) {
                w[static_cast<std::size_t>(p)] = std::max(w[static_cast<std::size_t>(p)], m.at(level, a, p).size());
            }
        }
    }
    return w;
}

std::string grammar_svg(const std::vector<GrammarMatrix>& matrices, const GrammarPlotOptions& opt) {
    const auto widths = plot_widths(matrices, opt.level);
    std::size_t total = 0;
    for (auto w : widths) total += w;
    if (matrices.empty() || total == 0) throw Error(ErrorKind::NothingEncoded, "no encoded words to plot");
    if (opt.axes.empty()) throw Error(ErrorKind::Usage, "no axes selected");

    const int cell = std::max(1, opt.cell);
    const int gap = 2;  // between phase blocks
    const int label_w = 110;
    const int top = 30;
    const int grid_w = static_cast<int>(total) * cell + gap * (kNumPhases - 1);
    const int grid_h = static_cast<int>(matrices.size()) * cell;
    const int block_h = grid_h + 40;
    const auto& pal = palette(opt.level);
    const int legend_h = 24;
    const int width = label_w + grid_w + 20;
    const int height = top + static_cast<int>(opt.axes.size()) * block_h + legend_h + 10;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"10\" y=\"18\" font-size=\"14\">" << to_string(opt.level) << " grammar</text>\n";

    for (std::size_t ai = 0; ai < opt.axes.size(); ++ai) {
        const Axis axis = opt.axes[ai];
        const int y0 = top + static_cast<int>(ai) * block_h;
        s << "<g id=\"axis-" << to_string(axis) << "\">\n";
        s << "<text x=\"10\" y=\"" << y0 + 12 << "\" font-size=\"13\">" << to_string(axis) << "</text>\n";
        int x = label_w;
        for (Phase p : kAllPhases) {
            const auto w = widths[static_cast<std::size_t>(p)];
            if (w > 0) {
                s << "<text x=\"" << x << "\" y=\"" << y0 + 12 << "\">" << to_string(p) << "</text>\n";
            }
            x += static_cast<int>(w) * cell + gap;
        }
        for (std::size_t r = 0; r < matrices.size(); ++r) {
            const int y = y0 + 18 + static_cast<int>(r) * cell;
            s << "<text x=\"10\" y=\"" << y + cell - 1 << "\" font-size=\"" << std::min(cell, 11) << "\">"
              << escape(matrices[r].trial_id) << "</text>\n";
            x = label_w;
            for (Phase p : kAllPhases) {
                const auto w = widths[static_cast<std::size_t>(p)];
                const auto& seq = matrices[r].at(opt.level, axis, p);
                if (!seq.empty()) {
                    const auto words = stretch(seq, w);
                    for (std::size_t j = 0; j < words.size(); ++j) {
                        s << "<rect x=\"" << x + static_cast<int>(j) * cell << "\" y=\"" << y << "\" width=\"" << cell
                          << "\" height=\"" << cell << "\" fill=\""
                          << pal[static_cast<std::size_t>(words[j])].hex() << "\"/>\n";
                    }
                }
                x += static_cast<int>(w) * cell + gap;
            }
        }
        s << "</g>\n";
    }

    const int ly = top + static_cast<int>(opt.axes.size()) * block_h;
    s << "<g id=\"legend\">\n";
    int lx = 10;
    for (std::size_t w = 0; w < pal.size(); ++w) {
        s << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\"" << pal[w].hex()
          << "\"/>\n";
        s << "<text x=\"" << lx + 16 << "\" y=\"" << ly + 10 << "\">" << word_name(opt.level, static_cast<int>(w))
          << "</text>\n";
        lx += 60;
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

std::string curve_svg(const EvalReport& report) {
    const double w = 640, h = 400, left = 60, right = 20, top = 30, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;
    std::size_t max_samples = 1;
    for (const auto& p : report.curve) max_samples = std::max(max_samples, p.train_samples);
    auto px = [&](double samples) { return left + pw * samples / static_cast<double>(max_samples); };
    auto py = [&](double acc) { return top + ph * (1.0 - acc); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << left << "\" y=\"18\" font-size=\"14\">mean validation accuracy</text>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"#000\"/>\n";
    s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"#000\"/>\n";
    for (int k = 0; k <= 10; k += 2) {
        const double acc = k / 10.0;
        s << "<line x1=\"" << left << "\" y1=\"" << fmt(py(acc)) << "\" x2=\"" << left + pw << "\" y2=\""
          << fmt(py(acc)) << "\" stroke=\"#e0e0e0\"/>\n";
        s << "<text x=\"" << left - 30 << "\" y=\"" << fmt(py(acc) + 4) << "\">" << fmt(acc) << "</text>\n";
    }
    const std::size_t tick = std::max<std::size_t>(4, (max_samples / 8 + 3) / 4 * 4);
    for (std::size_t t = 0; t <= max_samples; t += tick) {
        s << "<text x=\"" << fmt(px(static_cast<double>(t)) - 6) << "\" y=\"" << top + ph + 16 << "\">" << t
          << "</text>\n";
    }
    s << "<text x=\"" << left + pw / 2 - 40 << "\" y=\"" << h - 12 << "\">training samples</text>\n";

    struct Series {
        const char* name;
        const char* color;
        bool svm;
    };
    const Series series[] = {{"SVM", "#1f77b4", true}, {"Mondrian forest", "#d62728", false}};
    int legend_y = static_cast<int>(top) + 10;
    for (const auto& sr : series) {
        std::string pts;
        for (const auto& p : report.curve) {
            const auto& v = sr.svm ? p.svm : p.mondrian;
            if (!v) continue;
            pts += fmt(px(static_cast<double>(p.train_samples))) + "," + fmt(py(*v)) + " ";
        }
        if (pts.empty()) continue;
        pts.pop_back();
        s << "<polyline fill=\"none\" stroke=\"" << sr.color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
        s << "<rect x=\"" << left + pw - 150 << "\" y=\"" << legend_y + 60 << "\" width=\"12\" height=\"3\" fill=\""
          << sr.color << "\"/>\n";
        s << "<text x=\"" << left + pw - 132 << "\" y=\"" << legend_y + 65 << "\">" << sr.name << " ("
          << fmt(sr.svm ? report.svm_steady : report.mondrian_steady) << ")</text>\n";
        legend_y += 16;
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace actgram
