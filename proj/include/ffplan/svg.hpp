#pragma once
/**
 * @file
 * @brief SVG rendering of a world, its roadmap, and an executed plan trace:
 *  obstacles and regions, objects at their initial poses, the robot path as
 *  a polyline over Move waypoints, and numbered pick/place markers.
 */

#include <sstream>
#include <string>
#include <vector>

#include "ffplan/driver.hpp"

namespace ffplan {

namespace detail {

/// Workspace-to-viewport transform (y axis flipped for screen coordinates).
class SvgCanvas {
public:
    SvgCanvas(const Rect& workspace, double scale = 48)
        : ws_(workspace), s_(scale), margin_(12) {}

    double x(double wx) const { return margin_ + (wx - ws_.lo.x) * s_; }
    double y(double wy) const { return margin_ + (ws_.hi.y - wy) * s_; }
    double len(double l) const { return l * s_; }
    double width() const { return 2 * margin_ + (ws_.hi.x - ws_.lo.x) * s_; }
    double height() const { return 2 * margin_ + (ws_.hi.y - ws_.lo.y) * s_; }

private:
    Rect ws_;
    double s_, margin_;
};

inline void svg_rect(std::ostream& os, const SvgCanvas& c, const Rect& r,
                     const std::string& style) {
    os << "<rect x=\"" << c.x(r.lo.x) << "\" y=\"" << c.y(r.hi.y) << "\" width=\""
       << c.len(r.hi.x - r.lo.x) << "\" height=\"" << c.len(r.hi.y - r.lo.y) << "\" " << style
       << "/>\n";
}

inline void svg_circle(std::ostream& os, const SvgCanvas& c, Vec2 at, double r,
                       const std::string& style) {
    os << "<circle cx=\"" << c.x(at.x) << "\" cy=\"" << c.y(at.y) << "\" r=\"" << c.len(r)
       << "\" " << style << "/>\n";
}

inline void svg_text(std::ostream& os, const SvgCanvas& c, Vec2 at, const std::string& text,
                     const std::string& style) {
    os << "<text x=\"" << c.x(at.x) << "\" y=\"" << c.y(at.y) << "\" " << style << ">" << text
       << "</text>\n";
}

}  // namespace detail

struct RenderOptions {
    bool draw_roadmap = false;
    double scale = 48;
};

/// Renders the world at its initial state plus, if given, a validated plan's
/// trace: Move waypoints become one continuous polyline; each Pick/Place is a
/// numbered marker at its configuration.
inline std::string render_svg(const PPMProblem& ppm, const std::vector<PlanStep>& steps = {},
                              const Roadmap* roadmap = nullptr,
                              const RenderOptions& opt = {}) {
    const World& w = ppm.world;
    detail::SvgCanvas c(w.workspace, opt.scale);
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width() << "\" height=\""
       << c.height() << "\">\n";

    detail::svg_rect(os, c, w.workspace, "fill=\"#fcfcfc\" stroke=\"#333\" stroke-width=\"2\"");

    for (const auto& [name, r] : w.regions) {
        detail::svg_rect(os, c, r,
                         "fill=\"#dff2df\" stroke=\"#7a7\" stroke-dasharray=\"6,4\"");
        detail::svg_text(os, c, {r.lo.x + 0.1, r.hi.y - 0.3}, name,
                         "font-size=\"12\" fill=\"#575\"");
    }

    for (const Obstacle& ob : w.obstacles) {
        if (ob.shape.kind == Shape::Kind::Disc)
            detail::svg_circle(os, c, ob.pose.position, ob.shape.radius,
                               "fill=\"#888\" stroke=\"#555\"");
        else
            detail::svg_rect(os, c,
                             {ob.pose.position - ob.shape.half, ob.pose.position + ob.shape.half},
                             "fill=\"#888\" stroke=\"#555\"");
    }

    if (opt.draw_roadmap && roadmap) {
        os << "<g stroke=\"#bcd\" stroke-width=\"1\">\n";
        for (const RoadmapEdge& e : roadmap->edges) {
            os << "<line x1=\"" << c.x(roadmap->vertices[size_t(e.u)].x) << "\" y1=\""
               << c.y(roadmap->vertices[size_t(e.u)].y) << "\" x2=\""
               << c.x(roadmap->vertices[size_t(e.v)].x) << "\" y2=\""
               << c.y(roadmap->vertices[size_t(e.v)].y) << "\"/>\n";
        }
        os << "</g>\n";
    }

    for (size_t o = 0; o < w.objects.size(); ++o) {
        const ObjectSpec& obj = w.objects[o];
        bool has_goal = o < ppm.goals.size() && ppm.goals[o].any();
        detail::svg_circle(os, c, obj.initial.position, obj.radius,
                           has_goal ? "fill=\"#7c7\" stroke=\"#383\""
                                    : "fill=\"#cb8\" stroke=\"#975\"");
        detail::svg_text(os, c, obj.initial.position + Vec2{-0.2, -0.1}, obj.name,
                         "font-size=\"10\" fill=\"#222\"");
        if (o < ppm.goals.size() && ppm.goals[o].pose)
            detail::svg_circle(os, c, *ppm.goals[o].pose, obj.radius,
                               "fill=\"none\" stroke=\"#383\" stroke-dasharray=\"4,3\"");
    }

    detail::svg_circle(os, c, ppm.robot_start, w.robot_radius,
                       "fill=\"#68c\" fill-opacity=\"0.6\" stroke=\"#346\"");
    if (ppm.robot_goal)
        detail::svg_circle(os, c, *ppm.robot_goal, w.robot_radius,
                           "fill=\"none\" stroke=\"#346\" stroke-dasharray=\"4,3\"");

    if (!steps.empty()) {
        // One continuous polyline over every Move's waypoints, in step order.
        std::vector<Vec2> trace{ppm.robot_start};
        for (const PlanStep& st : steps)
            for (size_t i = 0; i < st.waypoints.size(); ++i)
                if (i > 0 || (st.waypoints[i] - trace.back()).norm() > 1e-12)
                    trace.push_back(st.waypoints[i]);
        os << "<polyline fill=\"none\" stroke=\"#d33\" stroke-width=\"2\" points=\"";
        for (Vec2 v : trace) os << c.x(v.x) << "," << c.y(v.y) << " ";
        os << "\"/>\n";

        // Manipulation markers at wherever the robot stands at that step.
        Vec2 cur = ppm.robot_start;
        int n = 0;
        for (const PlanStep& st : steps) {
            ++n;
            if (!st.waypoints.empty()) cur = st.waypoints.back();
            const Action& a = st.action;
            if (a.schema != Action::Schema::Pick && a.schema != Action::Schema::Place) continue;
            bool pick = a.schema == Action::Schema::Pick;
            detail::svg_circle(os, c, cur, 0.12, pick ? "fill=\"#d33\"" : "fill=\"#33d\"");
            detail::svg_text(os, c, cur + Vec2{0.15, 0.15}, std::to_string(n),
                             pick ? "font-size=\"11\" fill=\"#d33\""
                                  : "font-size=\"11\" fill=\"#33d\"");
        }
    }

    os << "</svg>\n";
    return os.str();
}

}  // namespace ffplan
