#include "arcfit/io.hpp"

#include "arcfit/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace arcfit::io {

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) out.push_back(t);
    return out;
}

double to_double(const std::string& s, const std::string& source, std::size_t line) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ParseError(source, line, "invalid number '" + s + "'");
    return v;
}

Label to_label(const std::string& s, const std::string& source, std::size_t line) {
    const double v = to_double(s, source, line);
    if (v == 0.0) return Label::NonCircle;
    if (v == 1.0) return Label::CircleBoundary;
    throw ParseError(source, line, "label must be 0 or 1, got '" + s + "'");
}

void check_weight(double w, const std::string& source, std::size_t line) {
    if (w < 0.0) throw ParseError(source, line, "weight must be nonnegative");
}

std::string strip_comment(std::string line) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CloudFormat parse_format(const std::string& name) {
    if (name == "xyz") return CloudFormat::Xyz;
    if (name == "ply") return CloudFormat::Ply;
    throw InvalidArgument("unknown cloud format '" + name + "'");
}

CloudFormat format_for(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".ply" ? CloudFormat::Ply : CloudFormat::Xyz;
}

PointCloud read_xyz(std::istream& in, const std::string& source) {
    PointCloud cloud;
    std::vector<double> weights;
    std::vector<Label> labels;
    std::size_t columns = 0;
    std::string raw;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        const auto tok = tokens(strip_comment(raw));
        if (tok.empty()) continue;
        if (tok.size() < 3 || tok.size() > 5)
            throw ParseError(source, line, "expected 3 to 5 columns, got " + std::to_string(tok.size()));
        if (columns == 0) columns = tok.size();
        if (tok.size() != columns)
            throw ParseError(source, line, "expected " + std::to_string(columns) + " columns, got " +
                                               std::to_string(tok.size()));
        cloud.points.emplace_back(to_double(tok[0], source, line), to_double(tok[1], source, line),
                                  to_double(tok[2], source, line));
        if (columns >= 4) {
            weights.push_back(to_double(tok[3], source, line));
            check_weight(weights.back(), source, line);
        }
        if (columns == 5) labels.push_back(to_label(tok[4], source, line));
    }
    if (columns >= 4) cloud.weights = std::move(weights);
    if (columns == 5) cloud.labels = std::move(labels);
    return cloud;
}

PointCloud read_ply(std::istream& in, const std::string& source) {
    std::string raw;
    std::size_t line = 0;
    auto next = [&](std::string& s) {
        if (!std::getline(in, s)) return false;
        ++line;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        return true;
    };
    if (!next(raw) || raw != "ply") throw ParseError(source, 1, "missing 'ply' magic");

    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> props;
        bool has_list = false;
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (true) {
        if (!next(raw)) throw ParseError(source, line, "unterminated header");
        const auto tok = tokens(raw);
        if (tok.empty()) continue;
        if (tok[0] == "end_header") break;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() < 2 || tok[1] != "ascii")
                throw ParseError(source, line, "only ASCII PLY is supported");
            ascii = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw ParseError(source, line, "malformed element line");
            Element e;
            e.name = tok[1];
            e.count = static_cast<std::size_t>(to_double(tok[2], source, line));
            elements.push_back(e);
        } else if (tok[0] == "property") {
            if (elements.empty()) throw ParseError(source, line, "property before element");
            if (tok.size() >= 2 && tok[1] == "list") {
                elements.back().has_list = true;
                elements.back().props.push_back(tok.back());
            } else if (tok.size() == 3) {
                elements.back().props.push_back(tok[2]);
            } else {
                throw ParseError(source, line, "malformed property line");
            }
        } else {
            throw ParseError(source, line, "unknown header keyword '" + tok[0] + "'");
        }
    }
    if (!ascii) throw ParseError(source, line, "missing format line");

    PointCloud cloud;
    bool seen_vertex = false;
    for (const auto& e : elements) {
        if (e.name != "vertex") {
            for (std::size_t k = 0; k < e.count; ++k)
                if (!next(raw)) throw ParseError(source, line, "truncated element '" + e.name + "'");
            continue;
        }
        seen_vertex = true;
        auto find = [&](const char* name) -> long {
            auto it = std::find(e.props.begin(), e.props.end(), name);
            return it == e.props.end() ? -1 : static_cast<long>(it - e.props.begin());
        };
        const long ix = find("x"), iy = find("y"), iz = find("z"), iw = find("weight"), il = find("label");
        if (ix < 0 || iy < 0 || iz < 0) throw ParseError(source, line, "vertex element lacks x/y/z");
        if (iw >= 0) cloud.weights.emplace();
        if (il >= 0) cloud.labels.emplace();
        cloud.points.reserve(e.count);
        for (std::size_t k = 0; k < e.count; ++k) {
            do {
                if (!next(raw)) throw ParseError(source, line, "truncated vertex data");
            } while (tokens(raw).empty());
            const auto tok = tokens(raw);
            if (tok.size() != e.props.size())
                throw ParseError(source, line, "expected " + std::to_string(e.props.size()) +
                                                   " values, got " + std::to_string(tok.size()));
            cloud.points.emplace_back(to_double(tok[ix], source, line), to_double(tok[iy], source, line),
                                      to_double(tok[iz], source, line));
            if (iw >= 0) {
                cloud.weights->push_back(to_double(tok[iw], source, line));
                check_weight(cloud.weights->back(), source, line);
            }
            if (il >= 0) cloud.labels->push_back(to_label(tok[il], source, line));
        }
    }
    if (!seen_vertex) throw ParseError(source, line, "no vertex element");
    return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
    const bool lab = cloud.labels.has_value();
    const bool wts = cloud.weights.has_value() || lab;
    out << "# x y z" << (wts ? " w" : "") << (lab ? " label" : "") << "\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.points[i];
        out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z());
        if (wts) out << ' ' << fmt(cloud.weights ? (*cloud.weights)[i] : 1.0);
        if (lab) out << ' ' << static_cast<int>((*cloud.labels)[i]);
        out << '\n';
    }
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n";
    if (cloud.weights) out << "property double weight\n";
    if (cloud.labels) out << "property uchar label\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& p = cloud.points[i];
        out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z());
        if (cloud.weights) out << ' ' << fmt((*cloud.weights)[i]);
        if (cloud.labels) out << ' ' << static_cast<int>((*cloud.labels)[i]);
        out << '\n';
    }
}

PointCloud read_cloud(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path.string());
    return format_for(path) == CloudFormat::Ply ? read_ply(f, path.string()) : read_xyz(f, path.string());
}

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    if (format == CloudFormat::Ply)
        write_ply(f, cloud);
    else
        write_xyz(f, cloud);
}

std::vector<double> read_weights(const std::filesystem::path& path) {
    if (format_for(path) == CloudFormat::Ply) {
        PointCloud c = read_cloud(path);
        if (!c.weights) throw FormatError(path.string() + ": PLY has no 'weight' property");
        return *c.weights;
    }
    std::ifstream f(path);
    if (!f) throw Error("cannot open " + path.string());
    std::vector<double> out;
    std::string raw;
    for (std::size_t line = 1; std::getline(f, raw); ++line) {
        const auto tok = tokens(strip_comment(raw));
        if (tok.empty()) continue;
        if (tok.size() != 1) throw ParseError(path.string(), line, "expected one value per line");
        out.push_back(to_double(tok[0], path.string(), line));
    }
    return out;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

}  // namespace arcfit::io
