#include "mfsi/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfsi {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int precision) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

std::vector<std::size_t> thin_indices(std::size_t n, std::size_t max_rows) {
    std::vector<std::size_t> idx;
    if (n == 0)
        return idx;
    if (max_rows < 2)
        max_rows = 2;
    if (n <= max_rows) {
        idx.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            idx[j] = j;
        return idx;
    }
    idx.resize(max_rows);
    for (std::size_t j = 0; j < max_rows; ++j)
        idx[j] = j * (n - 1) / (max_rows - 1);
    return idx;
}

std::string trajectory_csv(const Scenario& sc, const Trajectory& traj,
                           std::size_t max_rows) {
    std::string out = "t,s,i,p,par\n";
    for (std::size_t j : thin_indices(traj.samples.size(), max_rows)) {
        const Sample& smp = traj.samples[j];
        const double sum = smp.x.s + smp.x.i;
        out += format_double(smp.t);
        out += ',';
        out += format_double(smp.x.s);
        out += ',';
        out += format_double(smp.x.i);
        out += ',';
        out += format_double(sum / sc.params.alpha);
        out += ',';
        out += (sum == 0.0) ? "nan" : format_double(smp.x.i / sum);
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const SweepMap& map) {
    // fixed column names; the axis-to-parameter mapping lives in the header
    // of the run, not in the file
    std::string out = "axis1,axis2,outcome,endpoint_s,endpoint_i\n";
    for (const SweepCell& cell : map.cells) {
        out += format_double(cell.v1);
        out += ',';
        out += format_double(cell.v2);
        out += ',';
        out += to_string(cell.outcome.tag);
        out += ',';
        out += cell.outcome.has_endpoint ? format_double(cell.outcome.endpoint.s) : "nan";
        out += ',';
        out += cell.outcome.has_endpoint ? format_double(cell.outcome.endpoint.i) : "nan";
        out += '\n';
    }
    return out;
}

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 600;
constexpr int kMarginL = 70;
constexpr int kMarginR = 20;
constexpr int kMarginT = 20;
constexpr int kMarginB = 45;

std::string svg_open() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n"
           "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
}

std::string axis_frame() {
    std::ostringstream os;
    os << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
       << (kWidth - kMarginL - kMarginR) << "\" height=\""
       << (kHeight - kMarginT - kMarginB)
       << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    return os.str();
}

const char* outcome_color(OutcomeTag tag) {
    switch (tag) {
        case OutcomeTag::diverged: return "#d62728";
        case OutcomeTag::collapse_to_origin: return "#1f77b4";
        case OutcomeTag::s_dominant: return "#2ca02c";
        case OutcomeTag::i_dominant: return "#ff7f0e";
        case OutcomeTag::mixed: return "#9467bd";
        case OutcomeTag::invalid: return "#7f7f7f";
    }
    return "#000000";
}

} // namespace

std::string trajectory_svg(const Trajectory& traj, std::size_t max_rows) {
    const auto idx = thin_indices(traj.samples.size(), max_rows);
    double t_lo = traj.samples.front().t, t_hi = traj.samples.back().t;
    double v_lo = 0.0, v_hi = 0.0;
    bool first = true;
    for (std::size_t j : idx) {
        const State& x = traj.samples[j].x;
        if (!std::isfinite(x.s) || !std::isfinite(x.i))
            continue;
        if (first) {
            v_lo = std::min(x.s, x.i);
            v_hi = std::max(x.s, x.i);
            first = false;
        } else {
            v_lo = std::min(v_lo, std::min(x.s, x.i));
            v_hi = std::max(v_hi, std::max(x.s, x.i));
        }
    }
    if (t_hi <= t_lo)
        t_hi = t_lo + 1.0;
    if (v_hi <= v_lo) {
        v_lo -= 1.0;
        v_hi += 1.0;
    }

    const double pw = kWidth - kMarginL - kMarginR;
    const double ph = kHeight - kMarginT - kMarginB;
    auto map_x = [&](double t) {
        return kMarginL + (t - t_lo) / (t_hi - t_lo) * pw;
    };
    auto map_y = [&](double v) {
        return kHeight - kMarginB - (v - v_lo) / (v_hi - v_lo) * ph;
    };

    std::string svg = svg_open();
    svg += axis_frame();
    for (int tick = 0; tick <= 4; ++tick) {
        const double t = t_lo + (t_hi - t_lo) * tick / 4.0;
        const double v = v_lo + (v_hi - v_lo) * tick / 4.0;
        svg += "<text x=\"" + format_fixed(map_x(t), 2) + "\" y=\"" +
               format_fixed(kHeight - kMarginB + 18.0, 2) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + format_double(t) +
               "</text>\n";
        svg += "<text x=\"" + format_fixed(kMarginL - 6.0, 2) + "\" y=\"" +
               format_fixed(map_y(v) + 4.0, 2) +
               "\" font-size=\"12\" text-anchor=\"end\">" + format_double(v) +
               "</text>\n";
    }

    const char* colors[2] = {"#1f77b4", "#d62728"};
    const char* names[2] = {"s", "i"};
    for (int series = 0; series < 2; ++series) {
        std::string pts;
        for (std::size_t j : idx) {
            const Sample& smp = traj.samples[j];
            const double v = series == 0 ? smp.x.s : smp.x.i;
            if (!std::isfinite(v))
                continue;
            pts += format_fixed(map_x(smp.t), 2);
            pts += ',';
            pts += format_fixed(map_y(v), 2);
            pts += ' ';
        }
        svg += std::string("<polyline fill=\"none\" stroke=\"") + colors[series] +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        svg += std::string("<text x=\"") +
               format_fixed(kWidth - kMarginR - 40.0 + 22.0 * series, 2) +
               "\" y=\"" + format_fixed(kMarginT + 16.0, 2) +
               "\" font-size=\"14\" fill=\"" + colors[series] + "\">" +
               names[series] + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string sweep_svg(const SweepMap& map) {
    const double pw = kWidth - kMarginL - kMarginR;
    const double ph = kHeight - kMarginT - kMarginB;
    const int n1 = map.axis1.count;
    const int n2 = map.axis2.count;

    std::string svg = svg_open();
    for (int a = 0; a < n1; ++a) {
        for (int b = 0; b < n2; ++b) {
            const SweepCell& cell = map.cells[static_cast<std::size_t>(a) * n2 + b];
            const double x = kMarginL + pw * a / n1;
            const double y = kHeight - kMarginB - ph * (b + 1) / n2;
            svg += "<rect x=\"" + format_fixed(x, 2) + "\" y=\"" + format_fixed(y, 2) +
                   "\" width=\"" + format_fixed(pw / n1, 2) + "\" height=\"" +
                   format_fixed(ph / n2, 2) + "\" fill=\"" +
                   outcome_color(cell.outcome.tag) + "\"/>\n";
        }
    }
    svg += axis_frame();
    svg += "<text x=\"" + format_fixed(kMarginL + pw / 2.0, 2) + "\" y=\"" +
           format_fixed(kHeight - 8.0, 2) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + map.axis1.name +
           "</text>\n";
    svg += "<text x=\"14\" y=\"" + format_fixed(kMarginT + ph / 2.0, 2) +
           "\" font-size=\"13\" transform=\"rotate(-90 14 " +
           format_fixed(kMarginT + ph / 2.0, 2) + ")\" text-anchor=\"middle\">" +
           map.axis2.name + "</text>\n";

    static const OutcomeTag kTags[] = {
        OutcomeTag::diverged,   OutcomeTag::collapse_to_origin,
        OutcomeTag::s_dominant, OutcomeTag::i_dominant,
        OutcomeTag::mixed,      OutcomeTag::invalid,
    };
    double ly = kMarginT + 6.0;
    for (OutcomeTag tag : kTags) {
        svg += "<rect x=\"" + format_fixed(kWidth - kMarginR - 150.0, 2) + "\" y=\"" +
               format_fixed(ly, 2) + "\" width=\"12\" height=\"12\" fill=\"" +
               outcome_color(tag) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + format_fixed(kWidth - kMarginR - 134.0, 2) + "\" y=\"" +
               format_fixed(ly + 10.0, 2) + "\" font-size=\"12\">" +
               to_string(tag) + "</text>\n";
        ly += 18.0;
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

double parse_cell(const std::string& cell, std::size_t line_no) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double v = 0.0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw Error(ErrorCode::SchemaError,
                    "observations line " + std::to_string(line_no) +
                        ": not a number: " + cell);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

ObservationSet parse_observations_csv(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::SchemaError, "observations: empty file");
    while (!line.empty() && (line.back() == '\r'))
        line.pop_back();
    bool with_weights;
    if (line == "t,s,i")
        with_weights = false;
    else if (line == "t,s,i,w")
        with_weights = true;
    else
        throw Error(ErrorCode::SchemaError,
                    "observations: header must be t,s,i or t,s,i,w");

    ObservationSet obs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != (with_weights ? 4u : 3u))
            throw Error(ErrorCode::SchemaError,
                        "observations line " + std::to_string(line_no) +
                            ": wrong column count");
        Observation row;
        row.t = parse_cell(cells[0], line_no);
        row.s = parse_cell(cells[1], line_no);
        row.i = parse_cell(cells[2], line_no);
        row.w = with_weights ? parse_cell(cells[3], line_no) : 1.0;
        obs.rows.push_back(row);
    }
    obs.validate();
    return obs;
}

std::string observations_csv(const ObservationSet& obs) {
    std::string out = "t,s,i,w\n";
    for (const Observation& row : obs.rows) {
        out += format_double(row.t);
        out += ',';
        out += format_double(row.s);
        out += ',';
        out += format_double(row.i);
        out += ',';
        out += format_double(row.w);
        out += '\n';
    }
    return out;
}

std::string equilibria_report(const Region& region,
                              const std::vector<Equilibrium>& eqs) {
    std::string out = "equilibria in s:[" + format_double(region.s_lo) + "," +
                      format_double(region.s_hi) + "] i:[" +
                      format_double(region.i_lo) + "," +
                      format_double(region.i_hi) + "]: " +
                      std::to_string(eqs.size()) + " found\n";
    for (const Equilibrium& eq : eqs) {
        out += "point=(" + format_double(eq.point.s) + "," +
               format_double(eq.point.i) + ") class=" +
               to_string(eq.classification) + " trace=" + format_double(eq.trace) +
               " det=" + format_double(eq.det) + " eig=(" +
               format_double(eq.eigenvalues[0].real()) + "," +
               format_double(eq.eigenvalues[0].imag()) + ") (" +
               format_double(eq.eigenvalues[1].real()) + "," +
               format_double(eq.eigenvalues[1].imag()) + ") residual=" +
               format_double(eq.residual_norm) + "\n";
    }
    return out;
}

std::string fit_report(const FitResult& fr, const std::vector<std::string>& free) {
    auto is_free = [&](const char* name) {
        return std::find(free.begin(), free.end(), name) != free.end();
    };
    auto line = [&](const char* name, double v) {
        return std::string(name) + "=" + format_double(v) +
               (is_free(name) ? " fitted\n" : " frozen\n");
    };
    std::string out;
    out += std::string("fit converged=") + (fr.converged ? "true" : "false") + "\n";
    out += "evaluations=" + std::to_string(fr.evaluations) + "\n";
    out += "iterations=" + std::to_string(fr.trace.empty() ? 0 : fr.trace.back().first) + "\n";
    out += "residual=" + format_double(fr.residual) + "\n";
    out += line("alpha", fr.params.alpha);
    out += line("sigma", fr.params.sigma);
    out += line("beta1", fr.params.beta1);
    out += line("beta2", fr.params.beta2);
    out += line("mu1", fr.params.mu1);
    out += line("mu2", fr.params.mu2);
    out += "x0=(" + format_double(fr.x0.s) + "," + format_double(fr.x0.i) + ")\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::UsageError, "cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw Error(ErrorCode::UsageError, "write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::UsageError, "cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace mfsi
