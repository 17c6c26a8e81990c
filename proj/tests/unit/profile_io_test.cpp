#include <string>

#include <gtest/gtest.h>

#include "slicekit/error.hpp"
#include "slicekit/profile_io.hpp"

using namespace slicekit;

namespace {

ErrorCode parse_error(const std::string& text, std::string* message = nullptr) {
    try {
        parse_profile(text);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    ADD_FAILURE() << "accepted:\n" << text;
    return ErrorCode::Io;
}

}  // namespace

TEST(ProfileIo, EmptyTextGivesDeltaPlaDefaults) {
    const ProfileFile p = parse_profile("");
    EXPECT_EQ(p.machine, MachineProfile{});
    EXPECT_EQ(p.machine.build_volume, (Vec3{180, 180, 320}));
    EXPECT_EQ(p.machine.min_speed, 80.0);
    EXPECT_EQ(p.print.flow, PrintProfile{}.flow);
    EXPECT_EQ(p.print.material.name, "PLA");
    EXPECT_EQ(p.print.material.min_temp, 180.0);
    EXPECT_EQ(p.print.material.max_temp, 200.0);
    EXPECT_EQ(p.print.material.density, 1.24);
}

TEST(ProfileIo, OverridesAcrossSections) {
    const ProfileFile p = parse_profile(
        "# test profile\n"
        "[machine]\nbuild_x = 200\nmax_speed=120\n\n"
        "[process]\nlayer_height = 0.1 ; fine\ninfill_percent = 35\nperimeters = 3\noutline_direction = cw\n"
        "[material]\nname = PETG\ndensity = 1.27\nmin_temp = 190\nmax_temp = 250\n"
        "[process]\nnozzle_temp = 240\n");
    EXPECT_EQ(p.machine.build_volume.x, 200.0);
    EXPECT_EQ(p.machine.build_volume.y, 180.0);
    EXPECT_EQ(p.machine.max_speed, 120.0);
    EXPECT_EQ(p.print.layer_height(), 0.1);
    EXPECT_EQ(p.print.extrusion_width(), 0.48);
    EXPECT_EQ(p.print.infill_percent, 35.0);
    EXPECT_EQ(p.print.perimeter_count, 3);
    EXPECT_EQ(p.print.outline_direction, OutlineDirection::Clockwise);
    EXPECT_EQ(p.print.material.name, "PETG");
    EXPECT_EQ(p.print.nozzle_temp, 240.0);
}

TEST(ProfileIo, UnknownKeyIsNamed) {
    std::string msg;
    EXPECT_EQ(parse_error("[process]\ninfil_percent = 20\n", &msg), ErrorCode::ProfileSyntax);
    EXPECT_NE(msg.find("infil_percent"), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos);
}

TEST(ProfileIo, KeyInWrongSectionIsUnknown) {
    std::string msg;
    EXPECT_EQ(parse_error("[machine]\nlayer_height = 0.1\n", &msg), ErrorCode::ProfileSyntax);
    EXPECT_NE(msg.find("layer_height"), std::string::npos);
}

TEST(ProfileIo, SyntaxErrors) {
    EXPECT_EQ(parse_error("layer_height = 0.1\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[printer]\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[process\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[process]\nlayer_height 0.1\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[process]\nlayer_height = thin\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[process]\nperimeters = 2.5\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[process]\noutline_direction = left\n"), ErrorCode::ProfileSyntax);
    EXPECT_EQ(parse_error("[process]\nbed_temp = 60\nbed_temp = 70\n"), ErrorCode::ProfileSyntax);
}

TEST(ProfileIo, OutOfRangeValuesFailValidation) {
    EXPECT_EQ(parse_error("[process]\nnozzle_temp = 230\n"), ErrorCode::InvalidProfile);
    EXPECT_EQ(parse_error("[process]\ninfill_percent = 120\n"), ErrorCode::InvalidProfile);
    EXPECT_EQ(parse_error("[process]\nextrusion_width = 0.3\n"), ErrorCode::InvalidFlowParameters);
    EXPECT_EQ(parse_error("[machine]\nmin_speed = 200\n"), ErrorCode::InvalidProfile);
    EXPECT_EQ(parse_error("[material]\ndensity = 0\n"), ErrorCode::InvalidProfile);
}

TEST(ProfileIo, LayerHeightIsLeftToTheSlicer) {
    // 0.3 mm is valid flow geometry for a 0.4 mm nozzle; the machine's
    // resolution range is enforced when layers are planned.
    EXPECT_EQ(parse_profile("[process]\nlayer_height = 0.3\n").print.layer_height(), 0.3);
}

TEST(ProfileIo, FormatRoundTrips) {
    ProfileFile p;
    p.machine.build_volume.z = 250.5;
    p.print.infill_percent = 12.5;
    p.print.flow = p.print.flow.with_layer_height(0.15);
    p.print.material.name = "PLA+";
    const std::string text = format_profile(p);
    const ProfileFile back = parse_profile(text);
    EXPECT_EQ(back.machine, p.machine);
    EXPECT_EQ(back.print.flow, p.print.flow);
    EXPECT_EQ(back.print.infill_percent, 12.5);
    EXPECT_EQ(back.print.material, p.print.material);
    EXPECT_EQ(format_profile(back), text);
}
