#include "hyperflow/io.hpp"

#include <cstdio>
#include <ostream>

namespace hyperflow::io {

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

nlohmann::ordered_json to_json(const ValidationReport& report)
{
    nlohmann::ordered_json j;
    j["ok"] = report.ok;
    j["violations"] = nlohmann::ordered_json::array();
    for (const ValidationIssue& v : report.violations)
        j["violations"].push_back({{"rule", v.rule}, {"detail", v.detail}});
    j["advisories"] = nlohmann::ordered_json::array();
    for (const ValidationIssue& a : report.advisories)
        j["advisories"].push_back({{"rule", a.rule}, {"detail", a.detail}});
    j["degree_histogram"] = nlohmann::ordered_json::object();
    for (const auto& [degree, count] : report.degree_histogram)
        j["degree_histogram"][std::to_string(degree)] = count;
    if (report.chi_available)
        j["boundary_chi"] = report.boundary_chi;
    else
        j["boundary_chi"] = "unavailable";
    return j;
}

nlohmann::ordered_json to_json(const Triangulation& tri)
{
    nlohmann::ordered_json j;
    j["format"] = tri.format() == Triangulation::Format::gluing ? "gluing" : "incidence";
    j["num_tets"] = tri.num_tets();
    j["num_edges"] = tri.num_edges();
    j["tet_edges"] = nlohmann::ordered_json::array();
    for (int t = 0; t < tri.num_tets(); ++t)
        j["tet_edges"].push_back(tri.tet_classes(t));
    j["degrees"] = nlohmann::ordered_json::array();
    for (int e = 0; e < tri.num_edges(); ++e) j["degrees"].push_back(tri.degree(e));
    if (tri.format() == Triangulation::Format::gluing) {
        j["gluings"] = nlohmann::ordered_json::array();
        for (const FaceGluing& g : tri.gluings())
            j["gluings"].push_back({{"src", {g.src_tet, g.src_face}},
                                    {"dst", {g.dst_tet, g.dst_face}},
                                    {"image", g.image}});
    }
    if (tri.chi_available()) j["boundary_chi"] = tri.boundary_chi();
    return j;
}

nlohmann::ordered_json to_json(const SolveReport& report)
{
    nlohmann::ordered_json j;
    j["status"] = to_string(report.status);
    j["final_metric"] = nlohmann::ordered_json::array();
    for (int e = 0; e < report.final_metric.size(); ++e)
        j["final_metric"].push_back(report.final_metric[e]);
    j["final_curvature_norm"] = report.final_curvature_norm;
    if (report.rate)
        j["rate"] = *report.rate;
    else
        j["rate"] = nullptr;
    j["steps"] = report.steps;
    j["newton_iterations"] = report.newton_iterations;
    if (report.newton_handoff_time >= 0.0)
        j["newton_handoff_time"] = report.newton_handoff_time;
    else
        j["newton_handoff_time"] = nullptr;
    if (!report.message.empty()) j["message"] = report.message;
    return j;
}

void write_trace_csv(std::ostream& out, const FlowTrace& trace, int num_edges)
{
    out << "t";
    for (int e = 0; e < num_edges; ++e) out << ",l_e" << e;
    out << ",Knorm,energy\n";
    for (const FlowSample& s : trace.samples) {
        out << format_double(s.t);
        for (int e = 0; e < num_edges; ++e) out << "," << format_double(s.metric[e]);
        out << "," << format_double(s.curvature_norm) << "," << format_double(s.energy) << "\n";
    }
}

void write_events_csv(std::ostream& out, const FlowTrace& trace)
{
    out << "t,event,index\n";
    for (const FlowEvent& e : trace.events)
        out << format_double(e.t) << "," << e.kind << "," << e.index << "\n";
}

}  // namespace hyperflow::io
