#include "episcale/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace episcale {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc())
        throw std::invalid_argument("cannot parse number: '" + s + "'");
    return v;
}

std::string header_comment(const ModelParams& p, std::uint64_t seed) {
    std::ostringstream os;
    os << "# gamma=" << format_double(p.gamma) << " e0=" << format_double(p.e0)
       << " b=" << format_double(p.b) << " d=" << format_double(p.d)
       << " r0=" << format_double(p.r0) << " c0=" << format_double(p.c0)
       << " c1=" << format_double(p.c1) << " seed=" << seed;
    return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

}  // namespace

std::string profile_to_csv(const Profile& profile, const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "x,h\n";
    for (const auto& p : profile.breakpoints())
        os << format_double(p.x) << "," << format_double(p.h) << "\n";
    return os.str();
}

Profile profile_from_csv(const std::string& text) {
    auto lines = data_lines(text);
    if (lines.empty() || lines[0] != "x,h")
        throw std::invalid_argument("profile csv must start with header 'x,h'");
    std::vector<Profile::Breakpoint> pts;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto cells = split(lines[i], ',');
        if (cells.size() != 2)
            throw std::invalid_argument("profile csv row needs two cells");
        pts.push_back({parse_double(cells[0]), parse_double(cells[1])});
    }
    return Profile(std::move(pts));
}

std::string measure_to_csv(const DislocationMeasure& sigma, double r0,
                           const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "# b=" << format_double(sigma.b) << " r0=" << format_double(r0) << "\n";
    os << "x,y\n";
    for (const Vec2& p : sigma.cores)
        os << format_double(p.x) << "," << format_double(p.y) << "\n";
    return os.str();
}

DislocationMeasure measure_from_csv(const std::string& text, double* r0_out) {
    DislocationMeasure sigma;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# b=", 0) == 0) {
            auto parts = split(line.substr(2), ' ');
            for (const auto& kv : parts) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = kv.substr(0, eq);
                const double val = parse_double(kv.substr(eq + 1));
                if (key == "b") sigma.b = val;
                if (key == "r0" && r0_out) *r0_out = val;
            }
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "x,y")
                throw std::invalid_argument("measure csv must have header 'x,y'");
            header_seen = true;
            continue;
        }
        auto cells = split(line, ',');
        if (cells.size() != 2)
            throw std::invalid_argument("measure csv row needs two cells");
        sigma.cores.push_back({parse_double(cells[0]), parse_double(cells[1])});
    }
    return sigma;
}

std::string field_dump_csv(const StrainField& field,
                           std::span<const Vec2> points,
                           const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "x,y,H11,H12,H21,H22\n";
    for (const Vec2& p : points) {
        const Mat2 H = evaluate(field, p);
        os << format_double(p.x) << "," << format_double(p.y) << ","
           << format_double(H.a11) << "," << format_double(H.a12) << ","
           << format_double(H.a21) << "," << format_double(H.a22) << "\n";
    }
    return os.str();
}

std::string energy_report_csv(const EnergyBreakdown& e,
                              const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "surface,elastic,nucleation,total,elastic_err\n";
    os << format_double(e.surface) << "," << format_double(e.elastic) << ","
       << format_double(e.nucleation) << "," << format_double(e.total) << ","
       << format_double(e.elastic_quadrature_error) << "\n";
    return os.str();
}

std::string sweep_to_csv(std::span<const SweepRow> rows,
                         const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "gamma,e0,b,d,r0,c0,L,surface,elastic,nucleation,total,s,ratio,branch\n";
    for (const auto& row : rows) {
        const ModelParams& p = row.params;
        os << format_double(p.gamma) << "," << format_double(p.e0) << ","
           << format_double(p.b) << "," << format_double(p.d) << ","
           << format_double(p.r0) << "," << format_double(p.c0) << ",";
        if (row.flagged) {
            os << "nan,nan,nan,nan,nan,nan,nan,error\n";
            continue;
        }
        os << format_double(row.L) << "," << format_double(row.energy.surface)
           << "," << format_double(row.energy.elastic) << ","
           << format_double(row.energy.nucleation) << ","
           << format_double(row.energy.total) << "," << format_double(row.s)
           << "," << format_double(row.ratio) << "," << branch_name(row.branch)
           << "\n";
    }
    return os.str();
}

std::string ball_events_csv(const BallFamily& family, std::span<const Ball> input,
                            const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "t,event,id_a,id_b,id_new,cx,cy,r\n";
    for (std::size_t i = 0; i < input.size(); ++i) {
        const Ball& b = input[i];
        os << "0,init,-1,-1," << family.initial_ids()[i] << ","
           << format_double(b.center.x) << "," << format_double(b.center.y)
           << "," << format_double(b.radius) << "\n";
    }
    for (const MergeEvent& e : family.events()) {
        os << format_double(e.t) << ",merge," << e.id_a << "," << e.id_b << ","
           << e.id_new << "," << format_double(e.center.x) << ","
           << format_double(e.center.y) << "," << format_double(e.radius)
           << "\n";
    }
    return os.str();
}

std::string decomposition_csv(const SegmentDecomposition& dec,
                              const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << comment << "\n";
    os << "x_i,l_i,kind,d_i,cores\n";
    for (const Segment& s : dec.segments) {
        os << format_double(s.x) << "," << format_double(s.l) << ","
           << (s.kind == ScaleKind::HeightLimited ? "lh" : "ld") << ","
           << format_double(s.local_volume) << "," << s.core_count << "\n";
    }
    return os.str();
}

}  // namespace episcale
